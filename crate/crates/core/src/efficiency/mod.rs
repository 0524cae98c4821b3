//! Stochastic dominance between allocations and efficiency checks.

mod imperfect;
mod pareto;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, PrefOrder, Profile};
use crate::rational::{serde_rational, Rational};

pub use imperfect::{
    dominance_classes, imperfect_dominance_scan, ImperfectDominanceReport, ImperfectVerdict, Notion, ProfileClass,
};
pub use pareto::{
    expost_efficient_det, expost_efficient_random, ordinal_efficient_check, ExPostCheck, OrdinalEfficiency,
    RandomExPost, DEFAULT_NODE_BUDGET,
};

/// Outcome of comparing two things by first-order stochastic dominance.
///
/// Prefix sums of exact rows that agree everywhere force the rows to be
/// equal, so weak-but-not-strict dominance never arises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceResult {
    Equal,
    StrictDominates,
    StrictDominated,
    Incomparable,
}

impl DominanceResult {
    /// The verdict with the two sides exchanged.
    pub fn mirror(self) -> Self {
        match self {
            DominanceResult::StrictDominates => DominanceResult::StrictDominated,
            DominanceResult::StrictDominated => DominanceResult::StrictDominates,
            other => other,
        }
    }

    pub fn weakly_dominates(self) -> bool {
        matches!(self, DominanceResult::Equal | DominanceResult::StrictDominates)
    }

    pub fn weakly_dominated(self) -> bool {
        self.mirror().weakly_dominates()
    }

    pub fn is_comparable(self) -> bool {
        self != DominanceResult::Incomparable
    }

    /// Conjunction over independent components (agents).
    fn and(self, other: Self) -> Self {
        use DominanceResult::*;
        match (self, other) {
            (Equal, x) | (x, Equal) => x,
            (StrictDominates, StrictDominates) => StrictDominates,
            (StrictDominated, StrictDominated) => StrictDominated,
            _ => Incomparable,
        }
    }
}

fn compare_prefixes(v: impl Iterator<Item = Rational>, w: impl Iterator<Item = Rational>) -> DominanceResult {
    let (mut sv, mut sw) = (Rational::zero(), Rational::zero());
    let (mut gt, mut lt) = (false, false);
    for (a, b) in v.zip(w) {
        sv += a;
        sw += b;
        gt |= sv > sw;
        lt |= sv < sw;
    }
    match (gt, lt) {
        (false, false) => DominanceResult::Equal,
        (true, false) => DominanceResult::StrictDominates,
        (false, true) => DominanceResult::StrictDominated,
        (true, true) => DominanceResult::Incomparable,
    }
}

/// Compares two rows for an agent of type `t`.
pub fn fosd(v: &[Rational], w: &[Rational], t: &PrefOrder) -> Result<DominanceResult> {
    if v.len() != t.len() || w.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            found: if v.len() != t.len() { v.len() } else { w.len() },
        });
    }
    Ok(compare_prefixes(
        t.ranking().iter().map(|&j| v[j].clone()),
        t.ranking().iter().map(|&j| w[j].clone()),
    ))
}

fn check_dims(x: &Allocation, y: &Allocation, profile: &Profile) -> Result<()> {
    for a in [x, y] {
        if a.agents() != profile.agents() || a.objects() != profile.objects() {
            return Err(Error::DimensionMismatch {
                expected: profile.agents() * profile.objects(),
                found: a.agents() * a.objects(),
            });
        }
    }
    Ok(())
}

/// Agent-wise FOSD: `x` dominates `y` when every agent's row does.
pub fn ordinal_dominance(x: &Allocation, y: &Allocation, profile: &Profile) -> Result<DominanceResult> {
    check_dims(x, y, profile)?;
    let mut out = DominanceResult::Equal;
    for i in 0..profile.agents() {
        out = out.and(fosd(x.row(i), y.row(i), profile.pref(i))?);
        if out == DominanceResult::Incomparable {
            break;
        }
    }
    Ok(out)
}

/// Expected number of agents receiving their k-th choice, k = 1..m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankDistribution(#[serde(with = "serde_rational::vec")] pub Vec<Rational>);

impl RankDistribution {
    pub fn entries(&self) -> &[Rational] {
        &self.0
    }
}

pub fn rank_distribution(x: &Allocation, profile: &Profile) -> RankDistribution {
    let m = x.objects();
    let mut d = vec![Rational::zero(); m];
    for (i, t) in profile.prefs().iter().enumerate() {
        for (k, &j) in t.ranking().iter().enumerate() {
            d[k] += x.get(i, j);
        }
    }
    RankDistribution(d)
}

pub fn rank_dominance(x: &Allocation, y: &Allocation, profile: &Profile) -> Result<DominanceResult> {
    check_dims(x, y, profile)?;
    let dx = rank_distribution(x, profile);
    let dy = rank_distribution(y, profile);
    Ok(compare_prefixes(dx.0.into_iter(), dy.0.into_iter()))
}
