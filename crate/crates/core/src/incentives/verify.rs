use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{swap_values, DeltaVector};
use crate::enumerate::Reduction;
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::Setting;
use crate::rational::{format_rational, ratio, serde_rational, Rational};
use crate::scan::{AllocationTable, Case, Misreports, ScanPlan, Scope, DEFAULT_PROFILE_BUDGET};
use crate::SCHEMA_VERSION;

/// Default bisection width for the degree of strategyproofness.
pub const DEFAULT_DEGREE_TOLERANCE: (i64, i64) = (1, 1 << 20);

/// A violated constraint: `x_k(1/r) < 0` for this case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PspWitness {
    pub case: Case,
    pub rank: usize,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub delta: DeltaVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub mechanism: String,
    pub setting: Setting,
    pub reduction: Reduction,
    #[serde(with = "serde_rational")]
    pub r: Rational,
    pub verdict: bool,
    pub witness: Option<PspWitness>,
    pub profiles: usize,
    pub units: usize,
    pub constraints: u64,
}

/// Verifier bound to one mechanism and one scan; allocations are cached,
/// so repeated calls at different `r` only redo the arithmetic.
pub struct Verifier {
    label: String,
    plan: ScanPlan,
    table: AllocationTable,
}

impl Verifier {
    pub fn new(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<Self> {
        let plan = ScanPlan::new(setting, scope, DEFAULT_PROFILE_BUDGET)?;
        let table = AllocationTable::build(mech, &plan, Misreports::All)?;
        Ok(Verifier {
            label: mech.describe(),
            plan,
            table,
        })
    }

    pub fn from_parts(label: String, plan: ScanPlan, table: AllocationTable) -> Self {
        Verifier { label, plan, table }
    }

    pub fn plan(&self) -> &ScanPlan {
        &self.plan
    }

    pub fn table(&self) -> &AllocationTable {
        &self.table
    }

    pub fn verify(&self, r: &Rational) -> Result<VerificationReport> {
        check_r(r)?;
        let s = r.recip();
        let plan = &self.plan;
        let table = &self.table;
        let witness = plan.units.par_iter().find_map_first(|unit| {
            let truth = table.row(&plan.space, &unit.profile, unit.agent);
            let t = plan.space.get(unit.profile[unit.agent]);
            for report in plan.misreports(unit, Misreports::All) {
                let lie = table.row(&plan.space, &ScanPlan::with_report(unit, report), unit.agent);
                let delta = DeltaVector::between(&truth, &lie);
                if delta.is_zero() {
                    continue;
                }
                let values = swap_values(&delta.by_rank(t), &s);
                if let Some(k) = values.iter().position(Signed::is_negative) {
                    return Some(PspWitness {
                        case: plan.case(unit, report),
                        rank: k + 1,
                        value: values[k].clone(),
                        delta,
                    });
                }
            }
            None
        });
        let m = plan.setting.objects();
        let per_unit = (plan.space.len() as u64 - 1) * (m as u64 - 1);
        Ok(VerificationReport {
            schema_version: SCHEMA_VERSION,
            mechanism: self.label.clone(),
            setting: plan.setting.clone(),
            reduction: plan.reduction,
            r: r.clone(),
            verdict: witness.is_none(),
            witness,
            profiles: plan.profiles,
            units: plan.units.len(),
            constraints: per_unit * plan.units.len() as u64,
        })
    }

    /// Bisection for the largest `r` at which the mechanism is
    /// URBI(r)-partially strategyproof.
    pub fn degree(&self, tolerance: &Rational) -> Result<DegreeInterval> {
        if !tolerance.is_positive() || *tolerance >= Rational::one() {
            return Err(Error::ROutOfRange(format!("tolerance {tolerance}")));
        }
        let top = self.verify(&Rational::one())?;
        if top.verdict {
            return Ok(DegreeInterval {
                lo: Rational::one(),
                hi: Rational::one(),
                tolerance: tolerance.clone(),
                witness: None,
            });
        }
        let floor = self.verify(tolerance)?;
        if !floor.verdict {
            return Err(Error::NotPartiallySp {
                floor: format_rational(tolerance),
            });
        }
        let mut lo = tolerance.clone();
        let mut hi = Rational::one();
        let mut witness = top.witness;
        let two = Rational::from_integer(2.into());
        while &hi - &lo > *tolerance {
            let mid = (&lo + &hi) / &two;
            let report = self.verify(&mid)?;
            if report.verdict {
                lo = mid;
            } else {
                hi = mid;
                witness = report.witness;
            }
        }
        Ok(DegreeInterval {
            lo,
            hi,
            tolerance: tolerance.clone(),
            witness,
        })
    }
}

/// Verified bracket around the degree of strategyproofness: the mechanism
/// passes at `lo` and fails at `hi`, unless `lo = hi = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeInterval {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    #[serde(with = "serde_rational")]
    pub tolerance: Rational,
    pub witness: Option<PspWitness>,
}

impl DegreeInterval {
    pub fn is_strategyproof(&self) -> bool {
        self.lo.is_one()
    }

    /// True when every point of `self` lies strictly above `other`.
    pub fn strictly_above(&self, other: &DegreeInterval) -> bool {
        self.lo > other.hi || (self.is_strategyproof() && !other.is_strategyproof() && self.lo >= other.hi)
    }
}

pub fn verify_urbi_psp(
    mech: &dyn Mechanism,
    setting: &Setting,
    r: &Rational,
    scope: &Scope,
) -> Result<VerificationReport> {
    check_r(r)?;
    Verifier::new(mech, setting, scope)?.verify(r)
}

pub fn degree_of_strategyproofness(
    mech: &dyn Mechanism,
    setting: &Setting,
    scope: &Scope,
    tolerance: Option<&Rational>,
) -> Result<DegreeInterval> {
    let default = ratio(DEFAULT_DEGREE_TOLERANCE.0, DEFAULT_DEGREE_TOLERANCE.1);
    Verifier::new(mech, setting, scope)?.degree(tolerance.unwrap_or(&default))
}

pub(crate) fn check_r(r: &Rational) -> Result<()> {
    if r.is_zero() {
        return Err(Error::RZero);
    }
    if r.is_negative() || *r > Rational::one() {
        return Err(Error::ROutOfRange(format_rational(r)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismSpec;
    use crate::rational::int;

    fn unit3() -> Setting {
        Setting::unit(3, 3).unwrap()
    }

    #[test]
    fn rsd_passes_everywhere() {
        let v = Verifier::new(&MechanismSpec::Rsd, &unit3(), &Scope::Exhaustive(Reduction::None)).unwrap();
        for r in [ratio(1, 100), ratio(1, 2), int(1)] {
            assert!(v.verify(&r).unwrap().verdict);
        }
        let d = v.degree(&ratio(1, 1024)).unwrap();
        assert_eq!((d.lo, d.hi), (int(1), int(1)));
    }

    #[test]
    fn r_range_is_enforced() {
        let s = unit3();
        let scope = Scope::Exhaustive(Reduction::None);
        assert_eq!(
            verify_urbi_psp(&MechanismSpec::Rsd, &s, &int(0), &scope).unwrap_err(),
            Error::RZero
        );
        assert!(matches!(
            verify_urbi_psp(&MechanismSpec::Rsd, &s, &ratio(3, 2), &scope),
            Err(Error::ROutOfRange(_))
        ));
    }

    #[test]
    fn ps_witness_reverifies() {
        let s = unit3();
        let report = verify_urbi_psp(&MechanismSpec::Ps, &s, &int(1), &Scope::Exhaustive(Reduction::None)).unwrap();
        assert!(!report.verdict);
        let w = report.witness.unwrap();
        let delta =
            super::super::delta_vector(&MechanismSpec::Ps, &s, w.case.agent, &w.case.truthful, &w.case.report).unwrap();
        assert_eq!(delta, w.delta);
        let values = swap_values(&delta.by_rank(w.case.truthful.pref(w.case.agent)), &int(1));
        assert_eq!(values[w.rank - 1], w.value);
        assert!(w.value.is_negative());
    }

    #[test]
    fn const_has_no_degree_problem() {
        let d = degree_of_strategyproofness(
            &MechanismSpec::Const,
            &unit3(),
            &Scope::Exhaustive(Reduction::None),
            None,
        )
        .unwrap();
        assert!(d.is_strategyproof());
    }
}
