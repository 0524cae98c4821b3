use std::collections::HashMap;

use num_bigint::BigInt;

use crate::enumerate::{factorial, next_permutation};
use crate::error::{Error, Result};
use crate::model::{Allocation, DeterministicAllocation, Profile, Setting};
use crate::rational::Rational;

/// A priority order over agents: `order[0]` moves first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentOrdering(Vec<usize>);

impl AgentOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::InvalidPreference(format!(
                    "{order:?} is not an ordering of 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(AgentOrdering(order))
    }

    pub fn identity(n: usize) -> Self {
        AgentOrdering((0..n).collect())
    }

    pub fn agents(&self) -> &[usize] {
        &self.0
    }

    /// Position of each agent in the ordering (lower moves earlier).
    pub fn priorities(&self) -> Vec<usize> {
        let mut prio = vec![0; self.0.len()];
        for (pos, &i) in self.0.iter().enumerate() {
            prio[i] = pos;
        }
        prio
    }
}

/// All `n!` orderings in lexicographic order.
pub fn all_orderings(n: usize) -> impl Iterator<Item = AgentOrdering> {
    let mut current: Option<Vec<usize>> = Some((0..n).collect());
    std::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        if next_permutation(&mut next) {
            current = Some(next);
        }
        Some(AgentOrdering(out))
    })
}

/// Agents pick, in order, their favourite object with capacity left.
pub fn serial_dictatorship(profile: &Profile, ordering: &AgentOrdering, setting: &Setting) -> DeterministicAllocation {
    let mut remaining = setting.capacities().to_vec();
    let mut assignment = vec![0; profile.agents()];
    for &i in ordering.agents() {
        let pick = profile
            .pref(i)
            .ranking()
            .iter()
            .copied()
            .find(|&j| remaining[j] > 0)
            .expect("supply covers demand");
        remaining[pick] -= 1;
        assignment[i] = pick;
    }
    DeterministicAllocation::new(assignment)
}

/// How [`rsd`] computes the average over orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RsdEngine {
    /// Literal average over all `n!` orderings.
    Enumerate,
    /// Dynamic programme over (remaining agents per type, remaining
    /// capacities) where each remaining agent is equally likely to pick next.
    #[default]
    Recurse,
}

impl std::str::FromStr for RsdEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(RsdEngine::Enumerate),
            "recurse" => Ok(RsdEngine::Recurse),
            other => Err(Error::parse(0, format!("unknown engine '{other}'"))),
        }
    }
}

/// Random serial dictatorship. `ordering_budget` caps `n!` for the
/// enumerate engine.
pub fn rsd(profile: &Profile, setting: &Setting, engine: RsdEngine, ordering_budget: u128) -> Result<Allocation> {
    match engine {
        RsdEngine::Enumerate => {
            let n = profile.agents();
            let total = factorial(n);
            if total > ordering_budget {
                return Err(Error::SettingTooLarge {
                    what: format!("enumerating orderings of {n} agents"),
                    required: total,
                    budget: ordering_budget,
                });
            }
            Ok(average_over_orderings(profile, setting, |o| {
                serial_dictatorship(profile, o, setting)
            }))
        }
        RsdEngine::Recurse => Ok(rsd_recurse(profile, setting)),
    }
}

/// Averages a deterministic rule over all orderings, counting outcomes in
/// integers and dividing once.
pub(crate) fn average_over_orderings<F>(profile: &Profile, setting: &Setting, rule: F) -> Allocation
where
    F: Fn(&AgentOrdering) -> DeterministicAllocation,
{
    let n = profile.agents();
    let m = setting.objects();
    let mut counts = vec![0u64; n * m];
    for ordering in all_orderings(n) {
        let outcome = rule(&ordering);
        for (i, &j) in outcome.assignment.iter().enumerate() {
            counts[i * m + j] += 1;
        }
    }
    let total = BigInt::from(factorial(n));
    let probs = counts
        .into_iter()
        .map(|c| Rational::new(BigInt::from(c), total.clone()))
        .collect();
    Allocation::from_flat(n, m, probs)
}

fn rsd_recurse(profile: &Profile, setting: &Setting) -> Allocation {
    let n = profile.agents();
    let m = setting.objects();
    // agents with identical reports are interchangeable
    let mut groups: Vec<&[usize]> = Vec::new();
    let mut group_of = vec![0usize; n];
    for (i, slot) in group_of.iter_mut().enumerate() {
        let ranking = profile.pref(i).ranking();
        let g = match groups.iter().position(|r| *r == ranking) {
            Some(g) => g,
            None => {
                groups.push(ranking);
                groups.len() - 1
            }
        };
        *slot = g;
    }
    let mut sizes = vec![0u32; groups.len()];
    for &g in &group_of {
        sizes[g] += 1;
    }
    let mut mass = vec![Rational::from_integer(0.into()); groups.len() * m];
    type State = (Vec<u32>, Vec<u64>);
    let mut layer: HashMap<State, Rational> = HashMap::new();
    layer.insert(
        (sizes.clone(), setting.capacities().to_vec()),
        Rational::from_integer(1.into()),
    );
    for left in (1..=n as u32).rev() {
        let mut next: HashMap<State, Rational> = HashMap::with_capacity(layer.len() * 2);
        let denom = Rational::from_integer(left.into());
        for ((counts, caps), p) in layer {
            let share = &p / &denom;
            for (g, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let pick = groups[g]
                    .iter()
                    .copied()
                    .find(|&j| caps[j] > 0)
                    .expect("supply covers demand");
                let weight = &share * Rational::from_integer(c.into());
                mass[g * m + pick] += &weight;
                let mut counts2 = counts.clone();
                counts2[g] -= 1;
                let mut caps2 = caps.clone();
                caps2[pick] -= 1;
                *next
                    .entry((counts2, caps2))
                    .or_insert_with(|| Rational::from_integer(0.into())) += weight;
            }
        }
        layer = next;
    }
    let mut probs = Vec::with_capacity(n * m);
    for &g in &group_of {
        let size = Rational::from_integer(sizes[g].into());
        probs.extend(mass[g * m..(g + 1) * m].iter().map(|v| v / &size));
    }
    Allocation::from_flat(n, m, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::text::parse_profile;

    #[test]
    fn serial_dictatorship_examples() {
        let s = Setting::unit(3, 3).unwrap();
        let p = parse_profile(&s, "a>b>c;b>a>c;b>c>a").unwrap();
        let id = AgentOrdering::identity(3);
        assert_eq!(serial_dictatorship(&p, &id, &s).assignment, vec![0, 1, 2]);
        let rev = AgentOrdering::new(vec![2, 1, 0]).unwrap();
        assert_eq!(serial_dictatorship(&p, &rev, &s).assignment, vec![2, 0, 1]);
        let distinct = parse_profile(&s, "a>b>c;b>a>c;c>b>a").unwrap();
        for o in all_orderings(3) {
            assert_eq!(serial_dictatorship(&distinct, &o, &s).assignment, vec![0, 1, 2]);
        }
    }

    #[test]
    fn orderings_are_complete() {
        assert_eq!(all_orderings(4).count(), 24);
        assert_eq!(all_orderings(1).count(), 1);
        assert!(AgentOrdering::new(vec![0, 0]).is_err());
    }

    #[test]
    fn single_agent_gets_first_choice() {
        let s = Setting::unit(1, 3).unwrap();
        let p = parse_profile(&s, "c>a>b").unwrap();
        for engine in [RsdEngine::Enumerate, RsdEngine::Recurse] {
            let x = rsd(&p, &s, engine, 1000).unwrap();
            assert_eq!(x.row(0), &[int(0), int(0), int(1)]);
        }
    }

    #[test]
    fn enumerate_respects_budget() {
        let s = Setting::unit(4, 4).unwrap();
        let p = parse_profile(&s, "a>b>c>d;a>b>c>d;a>b>c>d;a>b>c>d").unwrap();
        assert!(matches!(
            rsd(&p, &s, RsdEngine::Enumerate, 23),
            Err(Error::SettingTooLarge { .. })
        ));
        let x = rsd(&p, &s, RsdEngine::Recurse, 0).unwrap();
        assert_eq!(*x.get(0, 0), ratio(1, 4));
    }
}
