use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Allocation, Profile, Setting};
use crate::rational::{format_rational, Rational};

/// A rank valuation must have one entry per object and be weakly decreasing.
pub fn validate_valuation(valuation: &[Rational], m: usize) -> Result<()> {
    if valuation.len() != m {
        return Err(Error::InvalidValuation(format!(
            "{} values for {m} objects",
            valuation.len()
        )));
    }
    if let Some(w) = valuation.windows(2).find(|w| w[0] < w[1]) {
        return Err(Error::InvalidValuation(format!(
            "{} < {} is increasing",
            format_rational(&w[0]),
            format_rational(&w[1])
        )));
    }
    Ok(())
}

/// Rank-value mechanism: a uniform lottery over all deterministic
/// allocations maximizing `Σ_i v[rank of i's object]`, found by brute
/// force over at most `budget` candidate assignments.
pub fn rank_value(profile: &Profile, setting: &Setting, valuation: &[Rational], budget: u128) -> Result<Allocation> {
    let n = profile.agents();
    let m = setting.objects();
    validate_valuation(valuation, m)?;
    let required = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::SettingTooLarge {
            what: format!("enumerating {m}^{n} deterministic allocations"),
            required,
            budget,
        });
    }
    // value of giving object j to agent i
    let value: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| valuation[profile.pref(i).rank_of(j) - 1].clone())
                .collect()
        })
        .collect();
    let mut best: Option<Rational> = None;
    let mut argmax: Vec<Vec<usize>> = Vec::new();
    let mut assignment = vec![0usize; n];
    let mut used = vec![0u64; m];
    search(
        0,
        &value,
        setting,
        &mut assignment,
        &mut used,
        Rational::zero(),
        &mut best,
        &mut argmax,
    );
    let count = BigInt::from(argmax.len());
    let mut counts = vec![0u64; n * m];
    for a in &argmax {
        for (i, &j) in a.iter().enumerate() {
            counts[i * m + j] += 1;
        }
    }
    let probs = counts
        .into_iter()
        .map(|c| Rational::new(BigInt::from(c), count.clone()))
        .collect();
    Ok(Allocation::from_flat(n, m, probs))
}

#[allow(clippy::too_many_arguments)]
fn search(
    i: usize,
    value: &[Vec<Rational>],
    setting: &Setting,
    assignment: &mut [usize],
    used: &mut [u64],
    acc: Rational,
    best: &mut Option<Rational>,
    argmax: &mut Vec<Vec<usize>>,
) {
    if i == value.len() {
        match best {
            Some(b) if acc < *b => {}
            Some(b) if acc == *b => argmax.push(assignment.to_vec()),
            _ => {
                *best = Some(acc);
                argmax.clear();
                argmax.push(assignment.to_vec());
            }
        }
        return;
    }
    for j in 0..setting.objects() {
        if used[j] < setting.capacity(j) {
            used[j] += 1;
            assignment[i] = j;
            search(
                i + 1,
                value,
                setting,
                assignment,
                used,
                &acc + &value[i][j],
                best,
                argmax,
            );
            used[j] -= 1;
        }
    }
}
