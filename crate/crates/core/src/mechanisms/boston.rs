use crate::enumerate::factorial;
use crate::error::{Error, Result};
use crate::model::{Allocation, DeterministicAllocation, Profile, Setting};

use super::serial::{average_over_orderings, AgentOrdering};

/// Where a rejected agent applies next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BostonVariant {
    /// Round `k`: the `k`-th ranked object, exhausted or not.
    Naive,
    /// Every round: the best object that still has capacity.
    Adaptive,
}

/// Deterministic Boston outcome with one priority ordering used in every
/// round (single tie-breaking).
pub fn boston_outcome(
    profile: &Profile,
    ordering: &AgentOrdering,
    setting: &Setting,
    variant: BostonVariant,
) -> DeterministicAllocation {
    let n = profile.agents();
    let m = setting.objects();
    let mut remaining = setting.capacities().to_vec();
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut unassigned = n;
    let mut round = 0;
    while unassigned > 0 {
        let mut applicants: Vec<Vec<usize>> = vec![Vec::new(); m];
        // iterate in priority order so each applicant list is sorted
        for &i in ordering.agents() {
            if assignment[i].is_some() {
                continue;
            }
            let ranking = profile.pref(i).ranking();
            let target = match variant {
                BostonVariant::Naive => ranking.get(round).copied(),
                BostonVariant::Adaptive => ranking.iter().copied().find(|&j| remaining[j] > 0),
            };
            if let Some(j) = target {
                applicants[j].push(i);
            }
        }
        for (j, list) in applicants.iter().enumerate() {
            for &i in list {
                if remaining[j] == 0 {
                    break;
                }
                remaining[j] -= 1;
                assignment[i] = Some(j);
                unassigned -= 1;
            }
        }
        round += 1;
        assert!(
            variant == BostonVariant::Adaptive || round <= m || unassigned == 0,
            "naive Boston left agents unassigned despite sufficient supply"
        );
    }
    DeterministicAllocation::new(assignment.into_iter().map(|a| a.expect("assigned")).collect())
}

fn boston(profile: &Profile, setting: &Setting, variant: BostonVariant, ordering_budget: u128) -> Result<Allocation> {
    let n = profile.agents();
    if factorial(n) > ordering_budget {
        return Err(Error::SettingTooLarge {
            what: format!("enumerating tie-breaking orders of {n} agents"),
            required: factorial(n),
            budget: ordering_budget,
        });
    }
    Ok(average_over_orderings(profile, setting, |o| {
        boston_outcome(profile, o, setting, variant)
    }))
}

/// Naive Boston mechanism with single uniform tie-breaking.
pub fn nbm(profile: &Profile, setting: &Setting, ordering_budget: u128) -> Result<Allocation> {
    boston(profile, setting, BostonVariant::Naive, ordering_budget)
}

/// Adaptive Boston mechanism with single uniform tie-breaking.
pub fn abm(profile: &Profile, setting: &Setting, ordering_budget: u128) -> Result<Allocation> {
    boston(profile, setting, BostonVariant::Adaptive, ordering_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::text::parse_profile;

    #[test]
    fn distinct_first_choices_clear_in_round_one() {
        let s = Setting::unit(3, 3).unwrap();
        let p = parse_profile(&s, "c>a>b;a>b>c;b>c>a").unwrap();
        let a = abm(&p, &s, 100).unwrap();
        let b = nbm(&p, &s, 100).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.row(0), &[int(0), int(0), int(1)]);
    }

    #[test]
    fn naive_wastes_a_round_adaptive_does_not() {
        let s = Setting::unit(4, 4).unwrap();
        let p = parse_profile(&s, "a>b>c>d;a>b>c>d;b>c>a>d;b>c>a>d").unwrap();
        let order = AgentOrdering::identity(4);
        // round 1: 0 takes a, 2 takes b. Naive: 1 re-applies to b and loses
        // c to 3. Adaptive: 1 skips b and beats 3 at c.
        let naive = boston_outcome(&p, &order, &s, BostonVariant::Naive);
        let adaptive = boston_outcome(&p, &order, &s, BostonVariant::Adaptive);
        assert_eq!(naive.assignment, vec![0, 3, 1, 2]);
        assert_eq!(adaptive.assignment, vec![0, 2, 1, 3]);
    }
}
