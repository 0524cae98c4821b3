//! Maximal mixing factor of a hybrid `(1−β)f + βg` under URBI(r)-partial
//! strategyproofness, plus certificates and curves over grids of `r`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::Reduction;
use crate::error::{Error, Result};
use crate::incentives::{
    axioms::{axioms_from_table, wlv_from_tables},
    check_r, swap_values, AxiomReport, DeltaVector, VerificationReport, Verifier,
};
use crate::mechanisms::Mechanism;
use crate::model::Setting;
use crate::rational::{format_decimal, format_rational, serde_rational, Rational};
use crate::scan::{AllocationTable, Case, Misreports, ScanPlan, Scope, DEFAULT_PROFILE_BUDGET};
use crate::SCHEMA_VERSION;

/// A constraint `x_k^f(s) − β(x_k^f(s) − x_k^g(s)) ≥ 0` that pins β.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BindingWitness {
    pub case: Case,
    pub rank: usize,
    #[serde(with = "serde_rational")]
    pub x_f: Rational,
    #[serde(with = "serde_rational")]
    pub x_g: Rational,
    /// `x_f / (x_f − x_g)`.
    #[serde(with = "serde_rational")]
    pub bound: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaMaxResult {
    pub schema_version: u32,
    pub f: String,
    pub g: String,
    pub setting: Setting,
    pub reduction: Reduction,
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub beta_max: Rational,
    /// The constraint that set `beta_max`; absent when β stays at 1.
    pub binding: Option<BindingWitness>,
    /// Set when a rank-1 constraint alone pushes β below 1. For an
    /// admissible pair this cannot happen.
    pub rank_one_adjustment: Option<BindingWitness>,
    /// False when some constraint forced β below 0 (f itself violates).
    pub feasible: bool,
    pub profiles: usize,
    pub units: usize,
    pub distinct_deltas: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub beta_max: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    #[serde(with = "serde_rational")]
    pub beta: Rational,
    #[serde(with = "serde_rational")]
    pub probe: Rational,
    /// Hybrid at β verifies.
    pub holds_at_beta: bool,
    /// Hybrid at `min(β + probe, 1)` fails; `None` when β = 1.
    pub fails_above: Option<bool>,
    pub valid: bool,
    pub witness_above: Option<crate::incentives::PspWitness>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub check_admissibility: bool,
    pub profile_budget: u128,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            check_admissibility: true,
            profile_budget: DEFAULT_PROFILE_BUDGET,
        }
    }
}

/// Scan position used for deterministic tie-breaking.
type Position = (usize, usize);

/// Rank-ordered deltas of one (unit, misreport) pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct DeltaPair {
    f: Vec<Rational>,
    g: Vec<Rational>,
}

#[derive(Debug, Clone)]
struct Candidate {
    bound: Rational,
    position: Position,
    rank: usize,
    x_f: Rational,
    x_g: Rational,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (&self.bound, self.position, self.rank) < (&other.bound, other.position, other.rank)
    }
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
        (a, b) => a.or(b),
    }
}

#[derive(Debug, Clone, Default)]
struct Best {
    any: Option<Candidate>,
    rank_one: Option<Candidate>,
}

/// Allocation tables for `f` and `g`, computed once and reused for every
/// `r`, certificate and curve point.
pub struct Solver {
    f_label: String,
    g_label: String,
    plan: ScanPlan,
    f_table: AllocationTable,
    g_table: AllocationTable,
    pairs: Vec<(DeltaPair, Position)>,
}

impl Solver {
    pub fn new(
        f: &dyn Mechanism,
        g: &dyn Mechanism,
        setting: &Setting,
        scope: &Scope,
        options: SolverOptions,
    ) -> Result<Self> {
        let plan = ScanPlan::new(setting, scope, options.profile_budget)?;
        let f_table = AllocationTable::build(f, &plan, Misreports::All)?;
        let g_table = AllocationTable::build(g, &plan, Misreports::All)?;
        let mut solver = Solver {
            f_label: f.describe(),
            g_label: g.describe(),
            plan,
            f_table,
            g_table,
            pairs: Vec::new(),
        };
        if options.check_admissibility {
            let report = solver.admissibility();
            if !report.verdict {
                let failed: Vec<String> = report
                    .verdicts
                    .iter()
                    .filter(|v| !v.holds)
                    .map(|v| format!("{} fails for {}", v.axiom, v.subject))
                    .collect();
                return Err(Error::NotHybridAdmissible(failed.join("; ")));
            }
        }
        solver.pairs = solver.distinct_pairs();
        Ok(solver)
    }

    pub fn plan(&self) -> &ScanPlan {
        &self.plan
    }

    pub fn admissibility(&self) -> AxiomReport {
        let sp = axioms_from_table(&self.f_label, &self.plan, &self.f_table);
        let mut wi = axioms_from_table(&self.g_label, &self.plan, &self.g_table);
        wi.verdicts
            .retain(|v| v.axiom == crate::incentives::Axiom::WeakInvariance);
        let wlv = wlv_from_tables(&self.g_label, &self.f_label, &self.plan, &self.g_table, &self.f_table);
        let mut out = sp;
        out.verdicts.extend(wi.verdicts);
        out.verdicts.extend(wlv.verdicts);
        out.verdict = out.verdicts.iter().all(|v| v.holds);
        out
    }

    /// Distinct rank-ordered (δ^f, δ^g) pairs with the first scan position
    /// at which each occurs. Pairs with δ^f = δ^g never constrain β.
    fn distinct_pairs(&self) -> Vec<(DeltaPair, Position)> {
        let plan = &self.plan;
        let per_unit: Vec<Vec<(DeltaPair, Position)>> = plan
            .units
            .par_iter()
            .enumerate()
            .map(|(u, unit)| {
                let t = plan.space.get(unit.profile[unit.agent]);
                let f_truth = self.f_table.row(&plan.space, &unit.profile, unit.agent);
                let g_truth = self.g_table.row(&plan.space, &unit.profile, unit.agent);
                let mut out = Vec::new();
                for report in plan.misreports(unit, Misreports::All) {
                    let lied = ScanPlan::with_report(unit, report);
                    let df = DeltaVector::between(&f_truth, &self.f_table.row(&plan.space, &lied, unit.agent));
                    let dg = DeltaVector::between(&g_truth, &self.g_table.row(&plan.space, &lied, unit.agent));
                    if df == dg {
                        continue;
                    }
                    out.push((
                        DeltaPair {
                            f: df.by_rank(t),
                            g: dg.by_rank(t),
                        },
                        (u, report),
                    ));
                }
                out
            })
            .collect();
        let mut first: HashMap<DeltaPair, Position> = HashMap::new();
        for unit in per_unit {
            for (pair, pos) in unit {
                first.entry(pair).or_insert(pos);
            }
        }
        let mut pairs: Vec<(DeltaPair, Position)> = first.into_iter().collect();
        pairs.sort_by_key(|p| p.1);
        pairs
    }

    fn best_at(&self, s: &Rational) -> Best {
        self.pairs
            .par_iter()
            .map(|(pair, position)| {
                let xf = swap_values(&pair.f, s);
                let xg = swap_values(&pair.g, s);
                let mut best = Best::default();
                for (k, (a, b)) in xf.iter().zip(&xg).enumerate() {
                    let diff = a - b;
                    if !diff.is_positive() {
                        continue;
                    }
                    let cand = Candidate {
                        bound: a / &diff,
                        position: *position,
                        rank: k + 1,
                        x_f: a.clone(),
                        x_g: b.clone(),
                    };
                    if k == 0 && cand.bound < Rational::one() {
                        best.rank_one = pick(best.rank_one, Some(cand.clone()));
                    }
                    best.any = pick(best.any, Some(cand));
                }
                best
            })
            .reduce(Best::default, |a, b| Best {
                any: pick(a.any, b.any),
                rank_one: pick(a.rank_one, b.rank_one),
            })
    }

    fn witness(&self, c: &Candidate) -> BindingWitness {
        let unit = &self.plan.units[c.position.0];
        BindingWitness {
            case: self.plan.case(unit, c.position.1),
            rank: c.rank,
            x_f: c.x_f.clone(),
            x_g: c.x_g.clone(),
            bound: c.bound.clone(),
        }
    }

    pub fn beta_max(&self, r: &Rational) -> Result<BetaMaxResult> {
        check_r(r)?;
        let best = self.best_at(&r.recip());
        let mut beta = Rational::one();
        let mut binding = None;
        if let Some(c) = &best.any {
            if c.bound < beta {
                beta = c.bound.clone();
                binding = Some(self.witness(c));
            }
        }
        let feasible = !beta.is_negative();
        if !feasible {
            beta = Rational::zero();
        }
        Ok(BetaMaxResult {
            schema_version: SCHEMA_VERSION,
            f: self.f_label.clone(),
            g: self.g_label.clone(),
            setting: self.plan.setting.clone(),
            reduction: self.plan.reduction,
            r: r.clone(),
            beta_max: beta,
            binding,
            rank_one_adjustment: best.rank_one.as_ref().map(|c| self.witness(c)),
            feasible,
            profiles: self.plan.profiles,
            units: self.plan.units.len(),
            distinct_deltas: self.pairs.len(),
        })
    }

    /// Exact verification of the hybrid at `beta`.
    pub fn verify_hybrid(&self, beta: &Rational, r: &Rational) -> Result<VerificationReport> {
        crate::model::check_beta(beta)?;
        let table = AllocationTable::hybrid(&self.f_table, &self.g_table, beta);
        let label = format!("hybrid({},{},{})", self.f_label, self.g_label, format_rational(beta));
        Verifier::from_parts(label, self.plan.clone(), table).verify(r)
    }

    /// Maximality certificate: the hybrid verifies at `beta` and fails at
    /// `min(beta + probe, 1)`.
    pub fn certify(&self, r: &Rational, beta: &Rational, probe: &Rational) -> Result<Certificate> {
        let at = self.verify_hybrid(beta, r)?;
        let (fails_above, witness_above) = if beta.is_one() {
            (None, None)
        } else {
            let above = std::cmp::min(beta + probe, Rational::one());
            let report = self.verify_hybrid(&above, r)?;
            (Some(!report.verdict), report.witness)
        };
        Ok(Certificate {
            beta: beta.clone(),
            probe: probe.clone(),
            holds_at_beta: at.verdict,
            valid: at.verdict && fails_above.unwrap_or(true),
            fails_above,
            witness_above,
        })
    }

    /// β_max at every grid point; the deltas are computed once.
    pub fn curve(&self, grid: &[Rational]) -> Result<Vec<CurvePoint>> {
        for w in grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::ROutOfRange("grid must be strictly ascending".into()));
            }
        }
        let points = grid
            .iter()
            .map(|r| {
                self.beta_max(r).map(|res| CurvePoint {
                    r: r.clone(),
                    beta_max: res.beta_max,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for w in points.windows(2) {
            if w[1].beta_max > w[0].beta_max {
                return Err(Error::Internal(format!(
                    "beta_max increases from r={} to r={}",
                    w[0].r, w[1].r
                )));
            }
        }
        Ok(points)
    }
}

pub fn beta_max(
    f: &dyn Mechanism,
    g: &dyn Mechanism,
    setting: &Setting,
    r: &Rational,
    scope: &Scope,
) -> Result<BetaMaxResult> {
    check_r(r)?;
    Solver::new(f, g, setting, scope, SolverOptions::default())?.beta_max(r)
}

pub fn certify(
    f: &dyn Mechanism,
    g: &dyn Mechanism,
    setting: &Setting,
    r: &Rational,
    beta: &Rational,
    probe: &Rational,
    scope: &Scope,
) -> Result<Certificate> {
    let options = SolverOptions {
        check_admissibility: false,
        ..SolverOptions::default()
    };
    Solver::new(f, g, setting, scope, options)?.certify(r, beta, probe)
}

pub fn beta_max_curve(
    f: &dyn Mechanism,
    g: &dyn Mechanism,
    setting: &Setting,
    grid: &[Rational],
    scope: &Scope,
) -> Result<Vec<CurvePoint>> {
    for r in grid {
        check_r(r)?;
    }
    Solver::new(f, g, setting, scope, SolverOptions::default())?.curve(grid)
}

/// `r,beta_max` CSV with a header row; exact unless `decimals` is set.
pub fn curve_csv(points: &[CurvePoint], decimals: Option<usize>) -> String {
    let render = |x: &Rational| match decimals {
        Some(d) => format_decimal(x, d),
        None => format_rational(x),
    };
    let mut out = String::from("r,beta_max\n");
    for p in points {
        let _ = writeln!(out, "{},{}", render(&p.r), render(&p.beta_max));
    }
    out
}

/// `{1/d, 2/d, …, 1}`.
pub fn uniform_grid(denominator: u32) -> Vec<Rational> {
    (1..=denominator)
        .map(|k| crate::rational::ratio(k as i64, denominator as i64))
        .collect()
}
