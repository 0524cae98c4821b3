//! Type space and profile enumeration, with the symmetry reductions used by
//! the exhaustive scans.

use serde::{Deserialize, Serialize};

use crate::model::{PrefOrder, Profile, Setting};

/// Which profiles an exhaustive scan visits.
///
/// The reductions are only sound for mechanisms that are anonymous
/// (`Anonymous`) or anonymous and neutral (`AnonymousNeutral`); the caller
/// asserts this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    #[default]
    None,
    Anonymous,
    AnonymousNeutral,
}

impl std::str::FromStr for Reduction {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "none" => Ok(Reduction::None),
            "anonymous" => Ok(Reduction::Anonymous),
            "anonymous_neutral" | "anonymous-neutral" => Ok(Reduction::AnonymousNeutral),
            other => Err(crate::Error::parse(0, format!("unknown reduction '{other}'"))),
        }
    }
}

impl std::fmt::Display for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Reduction::None => "none",
            Reduction::Anonymous => "anonymous",
            Reduction::AnonymousNeutral => "anonymous_neutral",
        })
    }
}

/// All `m!` strict rankings, in lexicographic order of the ranking sequence.
pub fn enumerate_types(m: usize) -> Vec<PrefOrder> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(PrefOrder::new(current.clone()).expect("permutation"));
        if !next_permutation(&mut current) {
            break;
        }
    }
    out
}

/// Advances to the lexicographically next permutation; false at the last one.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Indexed type space of one setting: type `0` is the identity ranking.
#[derive(Debug, Clone)]
pub struct TypeSpace {
    m: usize,
    types: Vec<PrefOrder>,
    neighbors: Vec<Vec<(usize, usize)>>,
}

impl TypeSpace {
    pub fn new(m: usize) -> Self {
        let types = enumerate_types(m);
        let mut space = TypeSpace {
            m,
            types,
            neighbors: Vec::new(),
        };
        space.neighbors = space
            .types
            .iter()
            .map(|t| (1..m).map(|k| (space.index_of(&t.swap_adjacent(k)), k)).collect())
            .collect();
        space
    }

    pub fn objects(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn get(&self, index: usize) -> &PrefOrder {
        &self.types[index]
    }

    pub fn types(&self) -> &[PrefOrder] {
        &self.types
    }

    /// Lexicographic rank of `t` (Lehmer code).
    pub fn index_of(&self, t: &PrefOrder) -> usize {
        lehmer_rank(t.ranking())
    }

    /// Neighbouring types with the 1-based rank of the swapped pair.
    pub fn neighbors(&self, index: usize) -> &[(usize, usize)] {
        &self.neighbors[index]
    }

    /// Index of `types[t]` after relabelling objects so that `types[anchor]`
    /// becomes the identity ranking.
    pub fn relabel_to_identity_of(&self, anchor: usize, t: usize) -> usize {
        let sigma = self.types[anchor].positions();
        let ranking: Vec<usize> = self.types[t].ranking().iter().map(|&j| sigma[j]).collect();
        lehmer_rank(&ranking)
    }

    pub fn profile(&self, indices: &[usize]) -> Profile {
        Profile::new(indices.iter().map(|&i| self.types[i].clone()).collect())
            .expect("type space orders share one object set")
    }

    pub fn indices(&self, profile: &Profile) -> Vec<usize> {
        profile.prefs().iter().map(|t| self.index_of(t)).collect()
    }
}

fn lehmer_rank(ranking: &[usize]) -> usize {
    let m = ranking.len();
    let mut rank = 0usize;
    for i in 0..m {
        let smaller = ranking[i + 1..].iter().filter(|&&x| x < ranking[i]).count();
        rank = rank * (m - i) + smaller;
    }
    rank
}

/// Number of profiles visited under `reduction`.
pub fn profile_count(setting: &Setting, reduction: Reduction) -> u128 {
    let types = factorial(setting.objects());
    let n = setting.agents() as u128;
    match reduction {
        Reduction::None => types.checked_pow(n as u32).unwrap_or(u128::MAX),
        Reduction::Anonymous => binomial(types + n - 1, n),
        Reduction::AnonymousNeutral => binomial(types + n - 2, n - 1),
    }
}

/// Profiles as type-index vectors with multiplicities.
///
/// * `None`: every profile, multiplicity 1.
/// * `Anonymous`: sorted profiles; multiplicity is the number of
///   orderings of that multiset.
/// * `AnonymousNeutral`: agent 0 holds the identity ranking and the others
///   are sorted; multiplicity counts the full profiles mapped onto the
///   representative, so multiplicities always sum to `(m!)^n`.
pub fn profile_indices(setting: &Setting, reduction: Reduction) -> Vec<(Vec<usize>, u128)> {
    let types = factorial(setting.objects()) as usize;
    let n = setting.agents();
    let mut out = Vec::new();
    match reduction {
        Reduction::None => {
            let mut current = vec![0usize; n];
            loop {
                out.push((current.clone(), 1));
                if !odometer(&mut current, types) {
                    break;
                }
            }
        }
        Reduction::Anonymous => {
            for multiset in multisets(n, types) {
                let mult = multinomial(&multiset);
                out.push((multiset, mult));
            }
        }
        Reduction::AnonymousNeutral => {
            for others in multisets(n - 1, types) {
                let mult = types as u128 * multinomial(&others);
                let mut profile = Vec::with_capacity(n);
                profile.push(0);
                profile.extend(others);
                out.push((profile, mult));
            }
        }
    }
    out
}

/// The `enumerate_profiles` stream in `Profile` form.
pub fn enumerate_profiles(setting: &Setting, reduction: Reduction) -> impl Iterator<Item = (Profile, u128)> {
    let space = TypeSpace::new(setting.objects());
    profile_indices(setting, reduction)
        .into_iter()
        .map(move |(idx, mult)| (space.profile(&idx), mult))
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Nondecreasing sequences of length `len` over `0..base`.
fn multisets(len: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut current = vec![0usize; len];
    loop {
        out.push(current.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] + 1 < base {
                let v = current[i] + 1;
                for c in current[i..].iter_mut() {
                    *c = v;
                }
                break;
            }
        }
    }
}

/// Number of distinct orderings of a sorted sequence.
fn multinomial(sorted: &[usize]) -> u128 {
    let mut result = factorial(sorted.len());
    let mut run = 1usize;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            result /= factorial(run);
            run = 1;
        }
    }
    if !sorted.is_empty() {
        result /= factorial(run);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn types_in_lexicographic_order() {
        assert_eq!(enumerate_types(1).len(), 1);
        let two: Vec<Vec<usize>> = enumerate_types(2).iter().map(|t| t.ranking().to_vec()).collect();
        assert_eq!(two, vec![vec![0, 1], vec![1, 0]]);
        let three = enumerate_types(3);
        assert_eq!(three.len(), 6);
        assert_eq!(three[0].ranking(), &[0, 1, 2]);
        assert_eq!(three[5].ranking(), &[2, 1, 0]);
        let space = TypeSpace::new(4);
        for (i, t) in space.types().iter().enumerate() {
            assert_eq!(space.index_of(t), i);
        }
    }

    #[test]
    fn profile_counts() {
        let s = Setting::unit(2, 2).unwrap();
        assert_eq!(profile_indices(&s, Reduction::None).len(), 4);
        let anon = profile_indices(&s, Reduction::Anonymous);
        assert_eq!(anon.len(), 3);
        assert_eq!(anon.iter().map(|p| p.1).collect::<Vec<_>>(), vec![1, 2, 1]);
    }

    #[test]
    fn anonymous_classes_match_brute_force_grouping() {
        let s = Setting::unit(3, 3).unwrap();
        let mut groups: BTreeMap<Vec<usize>, u128> = BTreeMap::new();
        for (p, _) in profile_indices(&s, Reduction::None) {
            let mut key = p.clone();
            key.sort();
            *groups.entry(key).or_default() += 1;
        }
        assert_eq!(groups.len(), 56);
        let anon: BTreeMap<Vec<usize>, u128> = profile_indices(&s, Reduction::Anonymous).into_iter().collect();
        assert_eq!(anon, groups);
        assert_eq!(profile_count(&s, Reduction::Anonymous), 56);
    }

    #[test]
    fn multiplicities_cover_the_full_space() {
        for (n, m) in [(1, 3), (2, 3), (3, 3), (3, 4), (4, 4), (2, 2)] {
            let s = Setting::unit(n, m).unwrap();
            let total = factorial(m).pow(n as u32);
            for red in [Reduction::None, Reduction::Anonymous, Reduction::AnonymousNeutral] {
                let profiles = profile_indices(&s, red);
                assert_eq!(profiles.len() as u128, profile_count(&s, red));
                let sum: u128 = profiles.iter().map(|p| p.1).sum();
                assert_eq!(sum, total, "n={n} m={m} {red}");
            }
        }
    }

    #[test]
    fn relabelling_to_identity() {
        let space = TypeSpace::new(3);
        for a in 0..space.len() {
            assert_eq!(space.relabel_to_identity_of(a, a), 0);
        }
    }
}
