use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::Reduction;
use crate::error::Result;
use crate::mechanisms::Mechanism;
use crate::model::{lower_contour_set, upper_contour_set, Setting};
use crate::rational::{serde_rational, Rational};
use crate::scan::{AllocationTable, Case, Misreports, ScanPlan, ScanUnit, Scope, DEFAULT_PROFILE_BUDGET};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    SwapConsistency,
    WeakInvariance,
    LowerInvariance,
    WeaklyLessVarying,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axiom::SwapConsistency => "swap consistency",
            Axiom::WeakInvariance => "weak invariance",
            Axiom::LowerInvariance => "lower invariance",
            Axiom::WeaklyLessVarying => "weakly less varying",
        })
    }
}

/// A neighbour swap at which the axiom fails, and the object whose
/// allocation moved illegally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomWitness {
    pub case: Case,
    /// The swap exchanges the objects at ranks `rank` and `rank + 1`.
    pub rank: usize,
    pub object: String,
    #[serde(with = "serde_rational")]
    pub before: Rational,
    #[serde(with = "serde_rational")]
    pub after: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    /// Mechanism the verdict is about (for WLV: "g vs f").
    pub subject: String,
    pub holds: bool,
    pub witness: Option<AxiomWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub schema_version: u32,
    pub setting: Setting,
    pub reduction: Reduction,
    pub verdict: bool,
    pub verdicts: Vec<AxiomVerdict>,
    pub profiles: usize,
    pub swaps: u64,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> Option<&AxiomVerdict> {
        self.verdicts.iter().find(|v| v.axiom == axiom)
    }

    pub fn holds(&self, axiom: Axiom) -> bool {
        self.get(axiom).map(|v| v.holds).unwrap_or(false)
    }

    fn merge(reports: Vec<AxiomReport>) -> AxiomReport {
        let mut it = reports.into_iter();
        let mut out = it.next().expect("at least one report");
        for r in it {
            out.verdicts.extend(r.verdicts);
            out.swaps += r.swaps;
        }
        out.verdict = out.verdicts.iter().all(|v| v.holds);
        out
    }
}

struct Swap<'a> {
    unit: &'a ScanUnit,
    report: usize,
    rank: usize,
    before: Vec<Rational>,
    after: Vec<Rational>,
}

/// Visits every (unit, neighbour) pair in scan order and returns, for each
/// check, the first failure found.
fn first_failures<F>(plan: &ScanPlan, table: &AllocationTable, checks: usize, test: F) -> Vec<Option<AxiomWitness>>
where
    F: Fn(&Swap) -> Vec<Option<(usize, Rational, Rational)>> + Sync,
{
    let per_unit: Vec<Vec<Option<AxiomWitness>>> = plan
        .units
        .par_iter()
        .map(|unit| {
            let mut found: Vec<Option<AxiomWitness>> = vec![None; checks];
            let truth_idx = unit.profile[unit.agent];
            let before = table.row(&plan.space, &unit.profile, unit.agent);
            for report in plan.misreports(unit, Misreports::Neighbors) {
                let rank = plan.swap_rank(truth_idx, report).expect("neighbour");
                let after = table.row(&plan.space, &ScanPlan::with_report(unit, report), unit.agent);
                let swap = Swap {
                    unit,
                    report,
                    rank,
                    before: before.clone(),
                    after,
                };
                for (slot, hit) in found.iter_mut().zip(test(&swap)) {
                    if slot.is_none() {
                        if let Some((object, b, a)) = hit {
                            *slot = Some(AxiomWitness {
                                case: plan.case(swap.unit, swap.report),
                                rank: swap.rank,
                                object: plan.setting.label(object),
                                before: b,
                                after: a,
                            });
                        }
                    }
                }
                if found.iter().all(Option::is_some) {
                    break;
                }
            }
            found
        })
        .collect();
    let mut out: Vec<Option<AxiomWitness>> = vec![None; checks];
    for unit in per_unit {
        for (slot, hit) in out.iter_mut().zip(unit) {
            if slot.is_none() {
                *slot = hit;
            }
        }
    }
    out
}

fn swap_count(plan: &ScanPlan) -> u64 {
    plan.units.len() as u64 * (plan.setting.objects() as u64 - 1)
}

fn first_change(objects: &[usize], swap: &Swap) -> Option<(usize, Rational, Rational)> {
    objects
        .iter()
        .find(|&&j| swap.before[j] != swap.after[j])
        .map(|&j| (j, swap.before[j].clone(), swap.after[j].clone()))
}

/// Runs all three swap axioms in a single scan.
pub fn check_axioms(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<AxiomReport> {
    let plan = ScanPlan::new(setting, scope, DEFAULT_PROFILE_BUDGET)?;
    let table = AllocationTable::build(mech, &plan, Misreports::Neighbors)?;
    Ok(axioms_from_table(&mech.describe(), &plan, &table))
}

pub(crate) fn axioms_from_table(label: &str, plan: &ScanPlan, table: &AllocationTable) -> AxiomReport {
    let found = first_failures(plan, table, 3, |swap| {
        let t = plan.space.get(swap.unit.profile[swap.unit.agent]);
        let a = t.choice(swap.rank);
        let b = t.choice(swap.rank + 1);
        let unchanged = swap.before == swap.after;
        let consistent = unchanged || (swap.after[a] < swap.before[a] && swap.after[b] > swap.before[b]);
        let sc = if consistent {
            None
        } else {
            let j = if swap.after[a] >= swap.before[a] { a } else { b };
            Some((j, swap.before[j].clone(), swap.after[j].clone()))
        };
        let wi = first_change(&upper_contour_set(a, t), swap);
        let li = first_change(&lower_contour_set(b, t), swap);
        vec![sc, wi, li]
    });
    let verdicts = [Axiom::SwapConsistency, Axiom::WeakInvariance, Axiom::LowerInvariance]
        .into_iter()
        .zip(found)
        .map(|(axiom, witness)| AxiomVerdict {
            axiom,
            subject: label.to_string(),
            holds: witness.is_none(),
            witness,
        })
        .collect::<Vec<_>>();
    AxiomReport {
        schema_version: SCHEMA_VERSION,
        setting: plan.setting.clone(),
        reduction: plan.reduction,
        verdict: verdicts.iter().all(|v| v.holds),
        verdicts,
        profiles: plan.profiles,
        swaps: swap_count(plan),
    }
}

fn only(mut report: AxiomReport, axiom: Axiom) -> AxiomReport {
    report.verdicts.retain(|v| v.axiom == axiom);
    report.verdict = report.verdicts.iter().all(|v| v.holds);
    report
}

pub fn check_swap_consistency(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<AxiomReport> {
    Ok(only(check_axioms(mech, setting, scope)?, Axiom::SwapConsistency))
}

pub fn check_weak_invariance(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<AxiomReport> {
    Ok(only(check_axioms(mech, setting, scope)?, Axiom::WeakInvariance))
}

pub fn check_lower_invariance(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<AxiomReport> {
    Ok(only(check_axioms(mech, setting, scope)?, Axiom::LowerInvariance))
}

/// Strategyproofness is exactly the conjunction of the three swap axioms.
pub fn check_strategyproof(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<AxiomReport> {
    check_axioms(mech, setting, scope)
}

/// `g` is weakly less varying than `f`: whenever a neighbour swap changes
/// an agent's row under `g`, it also changes it under `f`.
pub fn check_weakly_less_varying(
    g: &dyn Mechanism,
    f: &dyn Mechanism,
    setting: &Setting,
    scope: &Scope,
) -> Result<AxiomReport> {
    let plan = ScanPlan::new(setting, scope, DEFAULT_PROFILE_BUDGET)?;
    let g_table = AllocationTable::build(g, &plan, Misreports::Neighbors)?;
    let f_table = AllocationTable::build(f, &plan, Misreports::Neighbors)?;
    Ok(wlv_from_tables(&g.describe(), &f.describe(), &plan, &g_table, &f_table))
}

pub(crate) fn wlv_from_tables(
    g_label: &str,
    f_label: &str,
    plan: &ScanPlan,
    g_table: &AllocationTable,
    f_table: &AllocationTable,
) -> AxiomReport {
    let found = first_failures(plan, g_table, 1, |swap| {
        if swap.before == swap.after {
            return vec![None];
        }
        let lied = ScanPlan::with_report(swap.unit, swap.report);
        let f_before = f_table.row(&plan.space, &swap.unit.profile, swap.unit.agent);
        let f_after = f_table.row(&plan.space, &lied, swap.unit.agent);
        if f_before != f_after {
            return vec![None];
        }
        let j = (0..swap.before.len())
            .find(|&j| swap.before[j] != swap.after[j])
            .expect("changed");
        vec![Some((j, swap.before[j].clone(), swap.after[j].clone()))]
    });
    let witness = found.into_iter().next().flatten();
    AxiomReport {
        schema_version: SCHEMA_VERSION,
        setting: plan.setting.clone(),
        reduction: plan.reduction,
        verdict: witness.is_none(),
        verdicts: vec![AxiomVerdict {
            axiom: Axiom::WeaklyLessVarying,
            subject: format!("{g_label} vs {f_label}"),
            holds: witness.is_none(),
            witness,
        }],
        profiles: plan.profiles,
        swaps: swap_count(plan),
    }
}

/// `f` strategyproof, `g` weakly invariant, and `g` weakly less varying
/// than `f`: the conditions under which mixing in `g` keeps some
/// URBI(r)-partial strategyproofness.
pub fn check_hybrid_admissible(
    f: &dyn Mechanism,
    g: &dyn Mechanism,
    setting: &Setting,
    scope: &Scope,
) -> Result<AxiomReport> {
    let plan = ScanPlan::new(setting, scope, DEFAULT_PROFILE_BUDGET)?;
    let f_table = AllocationTable::build(f, &plan, Misreports::Neighbors)?;
    let g_table = AllocationTable::build(g, &plan, Misreports::Neighbors)?;
    let sp = axioms_from_table(&f.describe(), &plan, &f_table);
    let wi = only(axioms_from_table(&g.describe(), &plan, &g_table), Axiom::WeakInvariance);
    let wlv = wlv_from_tables(&g.describe(), &f.describe(), &plan, &g_table, &f_table);
    Ok(AxiomReport::merge(vec![sp, wi, wlv]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismSpec;

    fn exhaustive() -> Scope {
        Scope::Exhaustive(Reduction::None)
    }

    #[test]
    fn rsd_and_const_satisfy_all_axioms() {
        let s = Setting::unit(3, 3).unwrap();
        for mech in [MechanismSpec::Rsd, MechanismSpec::Const] {
            let report = check_strategyproof(&mech, &s, &exhaustive()).unwrap();
            assert!(report.verdict, "{mech}");
            assert_eq!(report.verdicts.len(), 3);
        }
    }

    #[test]
    fn ps_fails_only_lower_invariance() {
        let s = Setting::unit(3, 3).unwrap();
        let report = check_axioms(&MechanismSpec::Ps, &s, &exhaustive()).unwrap();
        assert!(report.holds(Axiom::SwapConsistency));
        assert!(report.holds(Axiom::WeakInvariance));
        let li = report.get(Axiom::LowerInvariance).unwrap();
        assert!(!li.holds);
        let w = li.witness.as_ref().unwrap();
        assert_ne!(w.before, w.after);
    }

    #[test]
    fn admissible_pairs() {
        let s = Setting::unit(3, 3).unwrap();
        let r = check_hybrid_admissible(&MechanismSpec::Rsd, &MechanismSpec::Ps, &s, &exhaustive()).unwrap();
        assert!(r.verdict);
        assert_eq!(r.verdicts.len(), 5);
        let r = check_hybrid_admissible(&MechanismSpec::Ps, &MechanismSpec::Rsd, &s, &exhaustive()).unwrap();
        assert!(!r.verdict);
    }
}
