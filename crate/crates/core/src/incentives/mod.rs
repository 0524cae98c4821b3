//! Incentive properties: swap axioms, URBI(r)-partial strategyproofness,
//! the degree of strategyproofness, and the constructive mixing bound.

pub(crate) mod axioms;
mod verify;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{expected_utility, PrefOrder, Profile, Setting, UtilityVector};
use crate::rational::{serde_rational, Rational};
use crate::scan::{AllocationTable, Misreports, ScanPlan, Scope};

pub use axioms::{
    check_axioms, check_hybrid_admissible, check_lower_invariance, check_strategyproof, check_swap_consistency,
    check_weak_invariance, check_weakly_less_varying, Axiom, AxiomReport, AxiomVerdict, AxiomWitness,
};
pub(crate) use verify::check_r;
pub use verify::{
    degree_of_strategyproofness, verify_urbi_psp, DegreeInterval, PspWitness, VerificationReport, Verifier,
    DEFAULT_DEGREE_TOLERANCE,
};

/// Change in one agent's allocation when it misreports:
/// `δ_j = f(t_i)(j) − f(t_i')(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaVector(#[serde(with = "serde_rational::vec")] pub Vec<Rational>);

impl DeltaVector {
    pub fn between(truthful: &[Rational], misreport: &[Rational]) -> Self {
        DeltaVector(truthful.iter().zip(misreport).map(|(a, b)| a - b).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Entries reordered by the agent's true ranking.
    pub fn by_rank(&self, t: &PrefOrder) -> Vec<Rational> {
        t.ranking().iter().map(|&j| self.0[j].clone()).collect()
    }
}

pub fn delta_vector(
    mech: &dyn Mechanism,
    setting: &Setting,
    agent: usize,
    profile: &Profile,
    misreport: &PrefOrder,
) -> Result<DeltaVector> {
    let truthful = mech.allocate(setting, profile)?;
    let lied = mech.allocate(setting, &profile.with_report(agent, misreport.clone()))?;
    Ok(DeltaVector::between(truthful.row(agent), lied.row(agent)))
}

/// Polynomial in `s`; `coefficients[d]` multiplies `s^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapPolynomial {
    #[serde(with = "serde_rational::vec")]
    pub coefficients: Vec<Rational>,
}

impl SwapPolynomial {
    pub fn eval(&self, s: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * s + c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }
}

/// `x_1 = δ_{ch(1)}`, `x_k(s) = s·x_{k−1}(s) + δ_{ch(k)}` for ranks `1..m−1`.
pub fn swap_polynomials(delta: &DeltaVector, t: &PrefOrder) -> Vec<SwapPolynomial> {
    let d = delta.by_rank(t);
    let mut out: Vec<SwapPolynomial> = Vec::with_capacity(d.len().saturating_sub(1));
    for dk in d.iter().take(d.len().saturating_sub(1)) {
        let mut coefficients = vec![dk.clone()];
        if let Some(prev) = out.last() {
            coefficients.extend(prev.coefficients.iter().cloned());
        }
        out.push(SwapPolynomial { coefficients });
    }
    out
}

/// Values `x_1(s), …, x_{m−1}(s)` straight from rank-ordered deltas.
pub fn swap_values(by_rank: &[Rational], s: &Rational) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(by_rank.len().saturating_sub(1));
    for dk in by_rank.iter().take(by_rank.len().saturating_sub(1)) {
        let x = match out.last() {
            Some(prev) => prev * s + dk,
            None => dk.clone(),
        };
        out.push(x);
    }
    out
}

/// `⟨u, f(t_i') − f(t_i)⟩`; positive means the misreport pays off.
pub fn manipulation_gain(
    u: &UtilityVector,
    mech: &dyn Mechanism,
    setting: &Setting,
    agent: usize,
    profile: &Profile,
    misreport: &PrefOrder,
) -> Result<Rational> {
    if !u.is_consistent_with(profile.pref(agent)) {
        return Err(Error::InconsistentUtility);
    }
    let delta = delta_vector(mech, setting, agent, profile, misreport)?;
    Ok(-expected_utility(u, delta.entries())?)
}

/// Smallest positive `|δ_j|` over every agent, profile, misreport and
/// object, or `None` when the mechanism never reacts to a misreport.
pub fn compute_epsilon(mech: &dyn Mechanism, setting: &Setting, scope: &Scope) -> Result<Option<Rational>> {
    let plan = ScanPlan::new(setting, scope, crate::scan::DEFAULT_PROFILE_BUDGET)?;
    let table = AllocationTable::build(mech, &plan, Misreports::All)?;
    Ok(epsilon_from_table(&plan, &table))
}

pub(crate) fn epsilon_from_table(plan: &ScanPlan, table: &AllocationTable) -> Option<Rational> {
    plan.units
        .par_iter()
        .filter_map(|unit| {
            let truth = table.row(&plan.space, &unit.profile, unit.agent);
            plan.misreports(unit, Misreports::All)
                .into_iter()
                .flat_map(|t| {
                    let lie = table.row(&plan.space, &ScanPlan::with_report(unit, t), unit.agent);
                    truth
                        .iter()
                        .zip(lie)
                        .map(|(a, b)| (a - b).abs())
                        .filter(Signed::is_positive)
                        .collect::<Vec<_>>()
                })
                .min()
        })
        .min()
}

/// Mixing factor guaranteed safe by the constructive argument:
/// `ε(1−r) / (ε(1−r) + 1)`.
pub fn constructive_beta_bound(epsilon: &Rational, r: &Rational) -> Result<Rational> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidAllocation(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if r.is_negative() || *r > Rational::one() {
        return Err(Error::ROutOfRange(r.to_string()));
    }
    let slack = epsilon * (Rational::one() - r);
    Ok(&slack / (&slack + Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismSpec;
    use crate::rational::{int, ratio};
    use crate::text::{parse_pref, parse_profile};

    #[test]
    fn polynomials_follow_the_recursion() {
        let t = PrefOrder::identity(3);
        let polys = swap_polynomials(&DeltaVector(vec![int(1), int(-1), int(0)]), &t);
        assert_eq!(polys.len(), 2);
        assert_eq!(polys[0].coefficients, vec![int(1)]);
        assert_eq!(polys[1].coefficients, vec![int(-1), int(1)]);
        let d = DeltaVector(vec![ratio(1, 3), ratio(-1, 2), ratio(1, 6), int(0)]);
        let t = PrefOrder::new(vec![2, 0, 3, 1]).unwrap();
        let polys = swap_polynomials(&d, &t);
        let s = ratio(7, 3);
        let values = swap_values(&d.by_rank(&t), &s);
        for (p, v) in polys.iter().zip(&values) {
            assert_eq!(&p.eval(&s), v);
        }
        let partial: Vec<Rational> = swap_values(&d.by_rank(&t), &int(1));
        assert_eq!(partial, vec![ratio(1, 6), ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(constructive_beta_bound(&ratio(1, 6), &ratio(1, 2)).unwrap(), ratio(1, 13));
        assert_eq!(constructive_beta_bound(&ratio(1, 6), &int(1)).unwrap(), int(0));
        assert!(constructive_beta_bound(&int(0), &ratio(1, 2)).is_err());
    }

    #[test]
    fn nbm_gain_on_the_six_agent_profile() {
        let s = Setting::unit(6, 6).unwrap();
        let p = parse_profile(
            &s,
            "a>b>c>d>e>f;a>b>c>d>e>f;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e",
        )
        .unwrap();
        let lie = parse_pref(&s, "a>b>d>c>e>f").unwrap();
        let d = delta_vector(&MechanismSpec::Nbm, &s, 0, &p, &lie).unwrap();
        assert_eq!(
            d.entries(),
            &[int(0), int(0), int(0), ratio(-1, 6), ratio(1, 6), int(0)]
        );
        let u = UtilityVector::new(vec![int(6), int(5), int(4), int(3), int(2), int(1)]).unwrap();
        let gain = manipulation_gain(&u, &MechanismSpec::Nbm, &s, 0, &p, &lie).unwrap();
        assert_eq!(gain, ratio(1, 6));
        let wrong = UtilityVector::new(vec![int(1), int(2), int(3), int(4), int(5), int(6)]).unwrap();
        assert_eq!(
            manipulation_gain(&wrong, &MechanismSpec::Nbm, &s, 0, &p, &lie),
            Err(Error::InconsistentUtility)
        );
    }

    #[test]
    fn epsilon_values() {
        let s = Setting::unit(3, 3).unwrap();
        let scope = Scope::Exhaustive(crate::Reduction::None);
        assert_eq!(compute_epsilon(&MechanismSpec::Const, &s, &scope).unwrap(), None);
        let eps = compute_epsilon(&MechanismSpec::Rsd, &s, &scope).unwrap().unwrap();
        assert_eq!((&eps * int(6)).denom(), &int(1).to_integer());
        let single = Setting::unit(1, 3).unwrap();
        assert_eq!(
            compute_epsilon(&MechanismSpec::Rsd, &single, &scope).unwrap(),
            Some(int(1))
        );
    }
}
