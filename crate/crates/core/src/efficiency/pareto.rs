use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::birkhoff::decompose_restricted;
use crate::error::Result;
use crate::model::{Allocation, DeterministicAllocation, Lottery, Profile, Setting};
use crate::rational::Rational;

/// Search-node budget for restricted decompositions.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;

/// Ex-post efficiency of a deterministic allocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExPostCheck {
    pub efficient: bool,
    /// Agents in an improving trade cycle: each takes the next one's object.
    pub cycle: Option<Vec<usize>>,
    /// An agent who prefers an object that still has free capacity.
    pub waste: Option<(usize, usize)>,
}

/// Finds a directed cycle in a graph given as adjacency lists.
fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = adj.len();
    let mut mark = vec![Mark::New; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Open;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                match mark[w] {
                    Mark::New => {
                        mark[w] = Mark::Open;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    Mark::Open => {
                        let mut cycle = vec![v];
                        let mut u = v;
                        while u != w {
                            u = parent[u];
                            cycle.push(u);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}

pub fn expost_efficient_det(x: &DeterministicAllocation, profile: &Profile, setting: &Setting) -> ExPostCheck {
    let n = x.assignment.len();
    let mut used = vec![0u64; setting.objects()];
    for &j in &x.assignment {
        used[j] += 1;
    }
    for i in 0..n {
        let t = profile.pref(i);
        let own = x.assignment[i];
        if let Some(&j) = t.ranking()[..t.rank_of(own) - 1]
            .iter()
            .find(|&&j| used[j] < setting.capacity(j))
        {
            return ExPostCheck {
                efficient: false,
                cycle: None,
                waste: Some((i, j)),
            };
        }
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let t = profile.pref(i);
            (0..n)
                .filter(|&k| t.prefers(x.assignment[k], x.assignment[i]))
                .collect()
        })
        .collect();
    let cycle = find_cycle(&adj);
    ExPostCheck {
        efficient: cycle.is_none(),
        cycle,
        waste: None,
    }
}

/// Constructive ex-post efficiency certificate for a random allocation.
/// Failure to find a decomposition does not refute efficiency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomExPost {
    pub certified: bool,
    pub lottery: Option<Lottery>,
}

pub fn expost_efficient_random(
    x: &Allocation,
    profile: &Profile,
    setting: &Setting,
    node_budget: usize,
) -> Result<RandomExPost> {
    let accept = |d: &DeterministicAllocation| expost_efficient_det(d, profile, setting).efficient;
    let lottery = decompose_restricted(x, setting, &accept, node_budget)?;
    Ok(RandomExPost {
        certified: lottery.is_some(),
        lottery,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrdinalEfficiency {
    pub efficient: bool,
    /// Objects `a_1 → a_2 → … → a_1` where the agent on edge `a_l → a_{l+1}`
    /// holds some `a_{l+1}` and prefers `a_l`; paired with that agent.
    pub cycle: Option<Vec<(usize, usize)>>,
    /// (agent, wanted object, held object) with spare capacity in the wanted one.
    pub waste: Option<(usize, usize, usize)>,
    /// An allocation that strictly ordinally dominates the input.
    pub dominating: Option<Allocation>,
}

/// Acyclicity of the "prefers a, holds some b" relation over objects, plus
/// non-wastefulness.
pub fn ordinal_efficient_check(x: &Allocation, profile: &Profile, setting: &Setting) -> OrdinalEfficiency {
    let n = x.agents();
    let m = x.objects();
    for i in 0..n {
        let t = profile.pref(i);
        for (kb, &b) in t.ranking().iter().enumerate() {
            if !x.get(i, b).is_positive() {
                continue;
            }
            for &a in &t.ranking()[..kb] {
                let spare = Rational::from_integer(setting.capacity(a).into()) - x.column_sum(a);
                if spare.is_positive() {
                    let eps = std::cmp::min(spare, x.get(i, b).clone());
                    let mut y = x.clone();
                    *y.get_mut(i, b) -= &eps;
                    *y.get_mut(i, a) += &eps;
                    return OrdinalEfficiency {
                        efficient: false,
                        cycle: None,
                        waste: Some((i, a, b)),
                        dominating: Some(y),
                    };
                }
            }
        }
    }
    // witness[a][b]: lowest agent preferring a while holding some b.
    let mut witness = vec![vec![None; m]; m];
    for i in (0..n).rev() {
        let t = profile.pref(i);
        for (b, held) in x.row(i).iter().enumerate() {
            if !held.is_positive() {
                continue;
            }
            for &a in &t.ranking()[..t.rank_of(b) - 1] {
                witness[a][b] = Some(i);
            }
        }
    }
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|a| (0..m).filter(|&b| witness[a][b].is_some()).collect())
        .collect();
    let Some(objects) = find_cycle(&adj) else {
        return OrdinalEfficiency {
            efficient: true,
            cycle: None,
            waste: None,
            dominating: None,
        };
    };
    let len = objects.len();
    let edges: Vec<(usize, usize)> = (0..len)
        .map(|l| {
            let a = objects[l];
            let b = objects[(l + 1) % len];
            (a, witness[a][b].expect("edge"))
        })
        .collect();
    let eps = (0..len)
        .map(|l| x.get(edges[l].1, objects[(l + 1) % len]).clone())
        .min()
        .expect("non-empty cycle");
    let mut y = x.clone();
    for l in 0..len {
        let (a, i) = edges[l];
        let b = objects[(l + 1) % len];
        *y.get_mut(i, b) -= &eps;
        *y.get_mut(i, a) += &eps;
    }
    debug_assert!(y.entries().iter().all(|v| !v.is_negative()));
    debug_assert!((0..m).all(|j| (x.column_sum(j) - y.column_sum(j)).is_zero()));
    OrdinalEfficiency {
        efficient: false,
        cycle: Some(edges),
        waste: None,
        dominating: Some(y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::{ordinal_dominance, DominanceResult};
    use crate::enumerate::{enumerate_profiles, Reduction};
    use crate::mechanisms::{all_orderings, ps, serial_dictatorship};
    use crate::rational::ratio;
    use crate::text::parse_profile;

    #[test]
    fn two_agent_swap() {
        let s = Setting::unit(2, 2).unwrap();
        let p = parse_profile(&s, "a>b;b>a").unwrap();
        let bad = expost_efficient_det(&DeterministicAllocation::new(vec![1, 0]), &p, &s);
        assert!(!bad.efficient);
        assert_eq!(bad.cycle.unwrap().len(), 2);
        assert!(expost_efficient_det(&DeterministicAllocation::new(vec![0, 1]), &p, &s).efficient);
    }

    #[test]
    fn serial_dictatorship_is_efficient() {
        let s = Setting::unit(3, 3).unwrap();
        for (p, _) in enumerate_profiles(&s, Reduction::None) {
            for o in all_orderings(3) {
                let d = serial_dictatorship(&p, &o, &s);
                assert!(expost_efficient_det(&d, &p, &s).efficient);
            }
        }
    }

    #[test]
    fn rsd_example_is_ordinally_inefficient() {
        let s = Setting::new(4, 3, vec![1, 1, 2]).unwrap();
        let p = parse_profile(&s, "a>b>c;a>b>c;b>a>c;b>a>c").unwrap();
        let (hi, lo, half) = (ratio(5, 12), ratio(1, 12), ratio(1, 2));
        let x = Allocation::from_rows(vec![
            vec![hi.clone(), lo.clone(), half.clone()],
            vec![hi.clone(), lo.clone(), half.clone()],
            vec![lo.clone(), hi.clone(), half.clone()],
            vec![lo, hi, half],
        ])
        .unwrap();
        let check = ordinal_efficient_check(&x, &p, &s);
        assert!(!check.efficient);
        let y = check.dominating.unwrap();
        y.validate(&s).unwrap();
        assert_eq!(ordinal_dominance(&y, &x, &p).unwrap(), DominanceResult::StrictDominates);
        assert!(ordinal_efficient_check(&ps(&p, &s), &p, &s).efficient);
    }

    #[test]
    fn waste_is_detected() {
        let s = Setting::unit(1, 2).unwrap();
        let p = parse_profile(&s, "a>b").unwrap();
        let x = Allocation::from_rows(vec![vec![ratio(1, 2), ratio(1, 2)]]).unwrap();
        let check = ordinal_efficient_check(&x, &p, &s);
        assert_eq!(check.waste, Some((0, 0, 1)));
        assert!(!expost_efficient_det(&DeterministicAllocation::new(vec![1]), &p, &s).efficient);
    }
}
