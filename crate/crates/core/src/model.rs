//! Market model: settings, strict preference orders, profiles, allocations.
//!
//! Objects and agents are 0-based indices. Ranks are 1-based, so
//! `choice(1)` is an agent's favourite object.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// A market instance: `n` agents and one capacity per object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Setting {
    n: usize,
    capacities: Vec<u64>,
    /// Index of a padding object that every agent ranks last, if any.
    dummy: Option<usize>,
}

impl Setting {
    /// Validates raw dimensions. Rejects `n > Σq`.
    pub fn new(n: usize, m: usize, capacities: Vec<u64>) -> Result<Self> {
        Self::validate(n, m, &capacities)?;
        let supply: u64 = capacities.iter().sum();
        if (n as u64) > supply {
            return Err(Error::SupplyShortfall { agents: n, supply });
        }
        Ok(Setting {
            n,
            capacities,
            dummy: None,
        })
    }

    /// Like [`Setting::new`], but appends one dummy object of capacity
    /// `n - Σq` when supply falls short.
    pub fn with_dummy_padding(n: usize, m: usize, mut capacities: Vec<u64>) -> Result<Self> {
        Self::validate(n, m, &capacities)?;
        let supply: u64 = capacities.iter().sum();
        if (n as u64) <= supply {
            return Self::new(n, m, capacities);
        }
        capacities.push(n as u64 - supply);
        Ok(Setting {
            n,
            dummy: Some(m),
            capacities,
        })
    }

    /// `n` agents, `m` objects of capacity one each.
    pub fn unit(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, vec![1; m])
    }

    fn validate(n: usize, m: usize, capacities: &[u64]) -> Result<()> {
        if n == 0 || m == 0 || capacities.len() != m || capacities.contains(&0) {
            return Err(Error::NonPositiveDimension {
                n,
                m,
                capacities: capacities.to_vec(),
            });
        }
        Ok(())
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn objects(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    pub fn capacity(&self, object: usize) -> u64 {
        self.capacities[object]
    }

    pub fn supply(&self) -> u64 {
        self.capacities.iter().sum()
    }

    pub fn dummy(&self) -> Option<usize> {
        self.dummy
    }

    /// Label used in the textual encodings: `a`, `b`, ... for up to 26
    /// objects, `o0`, `o1`, ... beyond that, `_` for the dummy.
    pub fn label(&self, object: usize) -> String {
        if Some(object) == self.dummy {
            return "_".to_string();
        }
        object_label(object, self.objects())
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        (0..self.objects()).find(|&j| self.label(j) == label)
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let caps: Vec<String> = self.capacities.iter().map(|c| c.to_string()).collect();
        write!(f, "n={},m={},q={}", self.n, self.objects(), caps.join(","))
    }
}

pub(crate) fn object_label(object: usize, m: usize) -> String {
    if m <= 26 {
        ((b'a' + object as u8) as char).to_string()
    } else {
        format!("o{object}")
    }
}

/// A strict ranking of all objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl PrefOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let m = ranking.len();
        if m == 0 {
            return Err(Error::InvalidPreference("empty ranking".into()));
        }
        let mut position = vec![usize::MAX; m];
        for (k, &obj) in ranking.iter().enumerate() {
            if obj >= m || position[obj] != usize::MAX {
                return Err(Error::InvalidPreference(format!(
                    "{ranking:?} is not a permutation of 0..{m}"
                )));
            }
            position[obj] = k;
        }
        Ok(PrefOrder { ranking, position })
    }

    pub fn identity(m: usize) -> Self {
        PrefOrder {
            ranking: (0..m).collect(),
            position: (0..m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// The `k`-th choice, `k` starting at 1.
    pub fn choice(&self, k: usize) -> usize {
        self.ranking[k - 1]
    }

    /// 1-based rank of `object`.
    pub fn rank_of(&self, object: usize) -> usize {
        self.position[object] + 1
    }

    /// 0-based position of each object in the ranking.
    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    /// Order obtained by swapping ranks `k` and `k+1` (1-based).
    pub fn swap_adjacent(&self, k: usize) -> Self {
        let mut ranking = self.ranking.clone();
        ranking.swap(k - 1, k);
        let mut position = self.position.clone();
        position[ranking[k - 1]] = k - 1;
        position[ranking[k]] = k;
        PrefOrder { ranking, position }
    }

    /// Applies an object relabelling: object `j` becomes `relabel[j]`.
    pub fn relabel(&self, relabel: &[usize]) -> Self {
        let ranking: Vec<usize> = self.ranking.iter().map(|&j| relabel[j]).collect();
        let mut position = vec![0; ranking.len()];
        for (k, &j) in ranking.iter().enumerate() {
            position[j] = k;
        }
        PrefOrder { ranking, position }
    }

    /// Renders as `a>b>c` with the setting's labels.
    pub fn display(&self, setting: &Setting) -> String {
        self.ranking
            .iter()
            .map(|&j| setting.label(j))
            .collect::<Vec<_>>()
            .join(">")
    }
}

/// All orders differing from `t` by one adjacent swap, paired with the
/// 1-based rank `k` of the swapped pair (ranks `k` and `k+1`).
pub fn neighborhood(t: &PrefOrder) -> Vec<(PrefOrder, usize)> {
    (1..t.len()).map(|k| (t.swap_adjacent(k), k)).collect()
}

/// Objects strictly preferred to `a` under `t`.
pub fn upper_contour_set(a: usize, t: &PrefOrder) -> Vec<usize> {
    t.ranking[..t.position[a]].to_vec()
}

/// Objects strictly less preferred than `a` under `t`.
pub fn lower_contour_set(a: usize, t: &PrefOrder) -> Vec<usize> {
    t.ranking[t.position[a] + 1..].to_vec()
}

/// Sequence of adjacent swaps leading from `from` to `to`: the first
/// object of `to` is bubbled to the front, then the second into second
/// position, and so on. Consecutive entries are neighbours.
pub fn canonical_transition(from: &PrefOrder, to: &PrefOrder) -> Vec<PrefOrder> {
    let mut current = from.clone();
    let mut path = vec![current.clone()];
    for target_pos in 0..to.len() {
        let object = to.ranking[target_pos];
        let mut p = current.position[object];
        while p > target_pos {
            current = current.swap_adjacent(p);
            path.push(current.clone());
            p -= 1;
        }
    }
    path
}

/// Number of object pairs ordered differently by `a` and `b`.
pub fn inversion_count(a: &PrefOrder, b: &PrefOrder) -> usize {
    let m = a.len();
    let mut count = 0;
    for x in 0..m {
        for y in 0..m {
            if a.prefers(x, y) && b.prefers(y, x) {
                count += 1;
            }
        }
    }
    count
}

/// One preference order per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    prefs: Vec<PrefOrder>,
}

impl Profile {
    pub fn new(prefs: Vec<PrefOrder>) -> Result<Self> {
        if prefs.is_empty() {
            return Err(Error::InvalidPreference("profile without agents".into()));
        }
        let m = prefs[0].len();
        if let Some(bad) = prefs.iter().find(|p| p.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        Ok(Profile { prefs })
    }

    pub fn for_setting(setting: &Setting, prefs: Vec<PrefOrder>) -> Result<Self> {
        if prefs.len() != setting.agents() {
            return Err(Error::ProfileLength {
                expected: setting.agents(),
                found: prefs.len(),
            });
        }
        let profile = Profile::new(prefs)?;
        if profile.objects() != setting.objects() {
            return Err(Error::DimensionMismatch {
                expected: setting.objects(),
                found: profile.objects(),
            });
        }
        Ok(profile)
    }

    pub fn agents(&self) -> usize {
        self.prefs.len()
    }

    pub fn objects(&self) -> usize {
        self.prefs[0].len()
    }

    pub fn prefs(&self) -> &[PrefOrder] {
        &self.prefs
    }

    pub fn pref(&self, agent: usize) -> &PrefOrder {
        &self.prefs[agent]
    }

    /// Same profile with agent `agent` reporting `report` instead.
    pub fn with_report(&self, agent: usize, report: PrefOrder) -> Self {
        let mut prefs = self.prefs.clone();
        prefs[agent] = report;
        Profile { prefs }
    }

    pub fn display(&self, setting: &Setting) -> String {
        self.prefs
            .iter()
            .map(|p| p.display(setting))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// A vNM utility over objects, with no two objects valued equally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityVector {
    values: Vec<Rational>,
}

impl UtilityVector {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        for a in 0..values.len() {
            for b in a + 1..values.len() {
                if values[a] == values[b] {
                    return Err(Error::UtilityTies);
                }
            }
        }
        Ok(UtilityVector { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Ranking by descending value.
    pub fn induced_order(&self) -> PrefOrder {
        let mut ranking: Vec<usize> = (0..self.values.len()).collect();
        ranking.sort_by(|&a, &b| self.values[b].cmp(&self.values[a]));
        PrefOrder::new(ranking).expect("sorted indices form a permutation")
    }

    pub fn is_consistent_with(&self, t: &PrefOrder) -> bool {
        self.values.len() == t.len() && self.induced_order() == *t
    }

    pub fn min(&self) -> Rational {
        self.values.iter().min().cloned().unwrap_or_else(Rational::zero)
    }
}

/// `⟨u, row⟩`.
pub fn expected_utility(u: &UtilityVector, row: &[Rational]) -> Result<Rational> {
    if u.values.len() != row.len() {
        return Err(Error::DimensionMismatch {
            expected: u.values.len(),
            found: row.len(),
        });
    }
    Ok(u.values.iter().zip(row).map(|(a, b)| a * b).sum())
}

/// Whether `u` has uniformly relatively bounded indifference with bound `r`:
/// for every object `b` directly below `a`, `r·(u(a) − min u) ≥ u(b) − min u`.
pub fn urbi_membership(u: &UtilityVector, r: &Rational) -> bool {
    let order = u.induced_order();
    let min = u.min();
    order.ranking.windows(2).all(|pair| {
        let upper = &u.values[pair[0]] - &min;
        let lower = &u.values[pair[1]] - &min;
        r * upper >= lower
    })
}

/// `n × m` matrix of assignment probabilities, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    n: usize,
    m: usize,
    probs: Vec<Rational>,
}

impl Allocation {
    pub fn zeros(n: usize, m: usize) -> Self {
        Allocation {
            n,
            m,
            probs: vec![Rational::zero(); n * m],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidAllocation("no rows".into()));
        }
        let m = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        Ok(Allocation {
            n,
            m,
            probs: rows.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_flat(n: usize, m: usize, probs: Vec<Rational>) -> Self {
        debug_assert_eq!(probs.len(), n * m);
        Allocation { n, m, probs }
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn objects(&self) -> usize {
        self.m
    }

    pub fn get(&self, agent: usize, object: usize) -> &Rational {
        &self.probs[agent * self.m + object]
    }

    pub fn get_mut(&mut self, agent: usize, object: usize) -> &mut Rational {
        &mut self.probs[agent * self.m + object]
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.probs[agent * self.m..(agent + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.probs.chunks(self.m)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.probs
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn column_sum(&self, object: usize) -> Rational {
        (0..self.n).map(|i| self.get(i, object)).sum()
    }

    /// Checks the fulfilment and capacity constraints exactly.
    pub fn validate(&self, setting: &Setting) -> Result<()> {
        if self.n != setting.agents() {
            return Err(Error::DimensionMismatch {
                expected: setting.agents(),
                found: self.n,
            });
        }
        if self.m != setting.objects() {
            return Err(Error::DimensionMismatch {
                expected: setting.objects(),
                found: self.m,
            });
        }
        for (i, row) in self.rows().enumerate() {
            if let Some(p) = row.iter().find(|p| p.is_negative() || **p > Rational::one()) {
                return Err(Error::InvalidAllocation(format!(
                    "entry {} of agent {i} outside [0,1]",
                    format_rational(p)
                )));
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::InvalidAllocation(format!(
                    "row {i} sums to {}",
                    format_rational(&sum)
                )));
            }
        }
        for j in 0..self.m {
            let col = self.column_sum(j);
            if col > Rational::from_integer(setting.capacity(j).into()) {
                return Err(Error::InvalidAllocation(format!(
                    "column {j} sums to {} above capacity {}",
                    format_rational(&col),
                    setting.capacity(j)
                )));
            }
        }
        Ok(())
    }

    /// Number of strictly positive entries.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|p| p.is_positive()).count()
    }

    /// Permutes rows: row `i` of the result is row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let mut probs = Vec::with_capacity(self.probs.len());
        for &i in order {
            probs.extend_from_slice(self.row(i));
        }
        Allocation::from_flat(self.n, self.m, probs)
    }

    /// Relabels columns: column `j` becomes column `relabel[j]`.
    pub fn relabel_columns(&self, relabel: &[usize]) -> Self {
        let mut out = Allocation::zeros(self.n, self.m);
        for i in 0..self.n {
            for (j, &to) in relabel.iter().enumerate() {
                *out.get_mut(i, to) = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn display(&self) -> String {
        self.rows()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(format_rational).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.rows().map(|r| r.iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| crate::rational::parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Allocation::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// `(1−β)·x + β·y`, entrywise.
pub fn convex_combine(x: &Allocation, y: &Allocation, beta: &Rational) -> Result<Allocation> {
    check_beta(beta)?;
    if x.n != y.n || x.m != y.m {
        return Err(Error::DimensionMismatch {
            expected: x.n * x.m,
            found: y.n * y.m,
        });
    }
    if beta.is_zero() {
        return Ok(x.clone());
    }
    if beta.is_one() {
        return Ok(y.clone());
    }
    let keep = Rational::one() - beta;
    let probs = x
        .probs
        .iter()
        .zip(&y.probs)
        .map(|(a, b)| &keep * a + beta * b)
        .collect();
    Ok(Allocation::from_flat(x.n, x.m, probs))
}

pub(crate) fn check_beta(beta: &Rational) -> Result<()> {
    if beta.is_negative() || *beta > Rational::one() {
        return Err(Error::BetaOutOfRange(format_rational(beta)));
    }
    Ok(())
}

/// One object per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicAllocation {
    pub assignment: Vec<usize>,
}

impl DeterministicAllocation {
    pub fn new(assignment: Vec<usize>) -> Self {
        DeterministicAllocation { assignment }
    }

    pub fn is_feasible(&self, setting: &Setting) -> bool {
        if self.assignment.len() != setting.agents() {
            return false;
        }
        let mut used = vec![0u64; setting.objects()];
        for &j in &self.assignment {
            if j >= setting.objects() {
                return false;
            }
            used[j] += 1;
        }
        used.iter().zip(setting.capacities()).all(|(u, q)| u <= q)
    }

    pub fn to_allocation(&self, m: usize) -> Allocation {
        let mut x = Allocation::zeros(self.assignment.len(), m);
        for (i, &j) in self.assignment.iter().enumerate() {
            *x.get_mut(i, j) = Rational::one();
        }
        x
    }
}

/// A lottery over deterministic allocations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lottery {
    pub outcomes: Vec<LotteryOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotteryOutcome {
    #[serde(with = "crate::rational::serde_rational")]
    pub probability: Rational,
    pub allocation: DeterministicAllocation,
}

impl Lottery {
    /// Probability-weighted sum of the outcome matrices.
    pub fn combine(&self, n: usize, m: usize) -> Allocation {
        let mut x = Allocation::zeros(n, m);
        for o in &self.outcomes {
            for (i, &j) in o.allocation.assignment.iter().enumerate() {
                *x.get_mut(i, j) += &o.probability;
            }
        }
        x
    }

    pub fn total_probability(&self) -> Rational {
        self.outcomes.iter().map(|o| &o.probability).sum()
    }

    /// `(1−β)·self ⊕ β·other`, the lottery implementing the convex
    /// combination of the two implemented allocations.
    pub fn mix(&self, other: &Lottery, beta: &Rational) -> Result<Lottery> {
        check_beta(beta)?;
        let keep = Rational::one() - beta;
        let mut outcomes: Vec<LotteryOutcome> = Vec::new();
        let scaled = self
            .outcomes
            .iter()
            .map(|o| (&keep * &o.probability, &o.allocation))
            .chain(other.outcomes.iter().map(|o| (beta * &o.probability, &o.allocation)));
        for (p, a) in scaled {
            if p.is_zero() {
                continue;
            }
            match outcomes.iter_mut().find(|o| o.allocation == *a) {
                Some(o) => o.probability += p,
                None => outcomes.push(LotteryOutcome {
                    probability: p,
                    allocation: a.clone(),
                }),
            }
        }
        Ok(Lottery { outcomes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn order(r: &[usize]) -> PrefOrder {
        PrefOrder::new(r.to_vec()).unwrap()
    }

    #[test]
    fn validates_settings() {
        assert!(Setting::new(3, 3, vec![1, 1, 1]).is_ok());
        assert!(Setting::new(4, 3, vec![1, 1, 2]).is_ok());
        assert!(matches!(
            Setting::new(3, 2, vec![1, 1]),
            Err(Error::SupplyShortfall { .. })
        ));
        assert!(matches!(
            Setting::new(0, 2, vec![1, 1]),
            Err(Error::NonPositiveDimension { .. })
        ));
        assert!(matches!(
            Setting::new(2, 2, vec![1, 0]),
            Err(Error::NonPositiveDimension { .. })
        ));
        let padded = Setting::with_dummy_padding(3, 2, vec![1, 1]).unwrap();
        assert_eq!(padded.objects(), 3);
        assert_eq!(padded.capacities(), &[1, 1, 1]);
        assert_eq!(padded.dummy(), Some(2));
    }

    #[test]
    fn neighbours_swap_adjacent_ranks() {
        let t = order(&[0, 1, 2]);
        let nb = neighborhood(&t);
        assert_eq!(nb, vec![(order(&[1, 0, 2]), 1), (order(&[0, 2, 1]), 2)]);
        assert!(neighborhood(&order(&[0])).is_empty());
        let rev = neighborhood(&order(&[2, 1, 0]));
        assert_eq!(rev[0].0, order(&[1, 2, 0]));
        assert_eq!(rev[1].0, order(&[2, 0, 1]));
    }

    #[test]
    fn contour_sets() {
        let t = order(&[0, 1, 2]);
        assert_eq!(upper_contour_set(1, &t), vec![0]);
        assert!(upper_contour_set(0, &t).is_empty());
        assert_eq!(lower_contour_set(1, &t), vec![2]);
    }

    #[test]
    fn canonical_transition_examples() {
        let abc = order(&[0, 1, 2]);
        assert_eq!(canonical_transition(&abc, &abc), vec![abc.clone()]);
        let bac = order(&[1, 0, 2]);
        assert_eq!(canonical_transition(&abc, &bac), vec![abc.clone(), bac]);
        let cba = order(&[2, 1, 0]);
        let path = canonical_transition(&abc, &cba);
        assert_eq!(path.len(), 4);
        assert_eq!(path.last(), Some(&cba));
    }

    #[test]
    fn utilities() {
        let u = UtilityVector::new(vec![int(1), ratio(1, 2), int(0)]).unwrap();
        assert_eq!(
            expected_utility(&u, &[ratio(3, 4), int(0), ratio(1, 4)]).unwrap(),
            ratio(3, 4)
        );
        let flat = vec![ratio(1, 3); 3];
        assert_eq!(expected_utility(&u, &flat).unwrap(), ratio(1, 2));
        assert!(urbi_membership(&u, &ratio(1, 2)));
        let v = UtilityVector::new(vec![int(1), ratio(3, 4), int(0)]).unwrap();
        assert!(!urbi_membership(&v, &ratio(1, 2)));
        assert!(UtilityVector::new(vec![int(1), int(1)]).is_err());
        assert!(matches!(
            expected_utility(&u, &[int(1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn geometric_utility_sits_on_the_boundary() {
        // (1, r, r², 0): every consecutive ratio above the minimum equals r
        let r = ratio(2, 5);
        let u = UtilityVector::new(vec![int(1), r.clone(), &r * &r, int(0)]).unwrap();
        assert!(urbi_membership(&u, &r));
        assert!(!urbi_membership(&u, &ratio(39, 100)));
        assert!(urbi_membership(&u, &ratio(1, 2)));
    }

    #[test]
    fn convex_combination_endpoints() {
        let x = Allocation::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let y = Allocation::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(convex_combine(&x, &y, &int(0)).unwrap(), x);
        assert_eq!(convex_combine(&x, &y, &int(1)).unwrap(), y);
        assert_eq!(convex_combine(&x, &x, &ratio(1, 3)).unwrap(), x);
        assert!(matches!(
            convex_combine(&x, &y, &ratio(3, 2)),
            Err(Error::BetaOutOfRange(_))
        ));
        let z = Allocation::from_rows(vec![vec![int(1)]]).unwrap();
        assert!(matches!(
            convex_combine(&x, &z, &ratio(1, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn allocation_validation() {
        let s = Setting::unit(2, 2).unwrap();
        let good = Allocation::from_rows(vec![vec![ratio(1, 2); 2]; 2]).unwrap();
        assert!(good.validate(&s).is_ok());
        let bad = Allocation::from_rows(vec![vec![int(1), int(0)]; 2]).unwrap();
        assert!(bad.validate(&s).is_err());
        let short = Allocation::from_rows(vec![vec![ratio(1, 2), int(0)]; 2]).unwrap();
        assert!(short.validate(&s).is_err());
    }
}
