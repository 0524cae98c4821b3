//! Birkhoff–von Neumann decomposition for capacitated allocations.
//!
//! An allocation with row sums `w` and column sums `c_j ≤ w·q_j` is peeled
//! into deterministic allocations. Each peeled allocation stays inside the
//! support of the remainder and fills every column that is tight
//! (`c_j = w·q_j`), so the remainder remains decomposable.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Allocation, DeterministicAllocation, Lottery, LotteryOutcome, Setting};
use crate::rational::Rational;

/// Decomposes `x` into a lottery over deterministic allocations whose
/// weighted sum is exactly `x`.
pub fn birkhoff_decompose(x: &Allocation, setting: &Setting) -> Result<Lottery> {
    x.validate(setting)
        .map_err(|e| Error::DecompositionFailure(e.to_string()))?;
    let mut budget = usize::MAX;
    decompose_inner(x, setting, &|_| true, &mut budget)?
        .ok_or_else(|| Error::DecompositionFailure("no feasible deterministic allocation".into()))
}

/// Decomposition restricted to deterministic allocations accepted by
/// `accept`, with backtracking over the choice of peeled allocation.
/// `Ok(None)` means the search found nothing within `node_budget` steps;
/// this does not prove that no restricted decomposition exists.
pub fn decompose_restricted(
    x: &Allocation,
    setting: &Setting,
    accept: &dyn Fn(&DeterministicAllocation) -> bool,
    node_budget: usize,
) -> Result<Option<Lottery>> {
    x.validate(setting)
        .map_err(|e| Error::DecompositionFailure(e.to_string()))?;
    let mut budget = node_budget;
    decompose_inner(x, setting, accept, &mut budget)
}

fn decompose_inner(
    x: &Allocation,
    setting: &Setting,
    accept: &dyn Fn(&DeterministicAllocation) -> bool,
    budget: &mut usize,
) -> Result<Option<Lottery>> {
    let mut outcomes = Vec::new();
    let found = peel(x.clone(), Rational::one(), setting, accept, budget, &mut outcomes);
    Ok(found.then_some(Lottery { outcomes }))
}

fn peel(
    remainder: Allocation,
    weight: Rational,
    setting: &Setting,
    accept: &dyn Fn(&DeterministicAllocation) -> bool,
    budget: &mut usize,
    outcomes: &mut Vec<LotteryOutcome>,
) -> bool {
    if weight.is_zero() {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let m = setting.objects();
    let slack: Vec<Rational> = (0..m)
        .map(|j| &weight * Rational::from_integer(setting.capacity(j).into()) - remainder.column_sum(j))
        .collect();
    let tight: Vec<bool> = slack.iter().map(|s| s.is_zero()).collect();
    for candidate in candidates(&remainder, setting, &tight) {
        if !accept(&candidate) {
            continue;
        }
        let mut used = vec![0u64; m];
        for &j in &candidate.assignment {
            used[j] += 1;
        }
        let mut lambda = weight.clone();
        for (i, &j) in candidate.assignment.iter().enumerate() {
            lambda = lambda.min(remainder.get(i, j).clone());
        }
        for j in 0..m {
            if !tight[j] && used[j] < setting.capacity(j) {
                let bound = &slack[j] / Rational::from_integer((setting.capacity(j) - used[j]).into());
                lambda = lambda.min(bound);
            }
        }
        if !lambda.is_positive() {
            continue;
        }
        let mut next = remainder.clone();
        for (i, &j) in candidate.assignment.iter().enumerate() {
            *next.get_mut(i, j) -= &lambda;
        }
        let mark = outcomes.len();
        outcomes.push(LotteryOutcome {
            probability: lambda.clone(),
            allocation: candidate,
        });
        if peel(next, &weight - &lambda, setting, accept, budget, outcomes) {
            return true;
        }
        outcomes.truncate(mark);
        if *budget == 0 {
            return false;
        }
    }
    false
}

/// Deterministic allocations inside the support of `x` that fill every
/// tight column to capacity, in lexicographic order.
fn candidates(x: &Allocation, setting: &Setting, tight: &[bool]) -> Vec<DeterministicAllocation> {
    let n = x.agents();
    let m = x.objects();
    let mut out = Vec::new();
    let mut used = vec![0u64; m];
    let mut assignment = vec![0usize; n];
    let tight_demand: u64 = (0..m).filter(|&j| tight[j]).map(|j| setting.capacity(j)).sum();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        x: &Allocation,
        setting: &Setting,
        tight: &[bool],
        used: &mut [u64],
        assignment: &mut [usize],
        tight_left: u64,
        out: &mut Vec<DeterministicAllocation>,
    ) {
        let n = x.agents();
        if ((n - i) as u64) < tight_left {
            return;
        }
        if i == n {
            out.push(DeterministicAllocation::new(assignment.to_vec()));
            return;
        }
        for j in 0..x.objects() {
            if x.get(i, j).is_positive() && used[j] < setting.capacity(j) {
                used[j] += 1;
                assignment[i] = j;
                let left = if tight[j] { tight_left - 1 } else { tight_left };
                rec(i + 1, x, setting, tight, used, assignment, left, out);
                used[j] -= 1;
            }
        }
    }
    rec(0, x, setting, tight, &mut used, &mut assignment, tight_demand, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn recombines(x: &Allocation, setting: &Setting) -> Lottery {
        let lottery = birkhoff_decompose(x, setting).unwrap();
        assert!(lottery.total_probability().is_one());
        assert!(lottery.outcomes.iter().all(|o| o.probability.is_positive()));
        assert!(lottery.outcomes.iter().all(|o| o.allocation.is_feasible(setting)));
        assert_eq!(lottery.combine(x.agents(), x.objects()), *x);
        lottery
    }

    #[test]
    fn deterministic_input_is_its_own_lottery() {
        let s = Setting::unit(2, 2).unwrap();
        let x = DeterministicAllocation::new(vec![1, 0]).to_allocation(2);
        let l = recombines(&x, &s);
        assert_eq!(l.outcomes.len(), 1);
        assert_eq!(l.outcomes[0].allocation.assignment, vec![1, 0]);
    }

    #[test]
    fn uniform_two_by_two() {
        let s = Setting::unit(2, 2).unwrap();
        let x = Allocation::from_rows(vec![vec![ratio(1, 2); 2]; 2]).unwrap();
        let l = recombines(&x, &s);
        assert_eq!(l.outcomes.len(), 2);
        assert!(l.outcomes.iter().all(|o| o.probability == ratio(1, 2)));
    }

    #[test]
    fn capacitated_and_slack_columns() {
        // 2 agents, capacities (1,1,2): slack of one unit overall
        let s = Setting::new(2, 3, vec![1, 1, 2]).unwrap();
        let x = Allocation::from_rows(vec![
            vec![ratio(1, 2), int(0), ratio(1, 2)],
            vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)],
        ])
        .unwrap();
        recombines(&x, &s);
    }

    #[test]
    fn rejects_invalid_input() {
        let s = Setting::unit(2, 2).unwrap();
        let x = Allocation::from_rows(vec![vec![int(1), int(0)]; 2]).unwrap();
        assert!(matches!(
            birkhoff_decompose(&x, &s),
            Err(Error::DecompositionFailure(_))
        ));
    }
}
