//! Shared machinery for exhaustive scans: scopes, scan units, and the
//! allocation cache that every verifier reads from.
//!
//! Allocations are computed once per setting, keyed by profile, before any
//! misreport is examined. Under a symmetry reduction the key is a canonical
//! representative and rows are mapped back on lookup.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{profile_count, profile_indices, Reduction, TypeSpace};
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{PrefOrder, Profile, Setting};
use crate::rational::Rational;

/// Default cap on the number of cached profiles.
pub const DEFAULT_PROFILE_BUDGET: u128 = 250_000;

/// Which (profile, agent) pairs a scan visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    /// Every profile, up to the given symmetry reduction.
    Exhaustive(Reduction),
    /// Only the listed profiles, every agent, no symmetry assumed.
    Profiles(Vec<Profile>),
}

impl Scope {
    pub fn reduction(&self) -> Reduction {
        match self {
            Scope::Exhaustive(r) => *r,
            Scope::Profiles(_) => Reduction::None,
        }
    }
}

/// Which misreports are examined for each scan unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Misreports {
    /// Adjacent swaps only (the axioms).
    Neighbors,
    /// Every other type.
    All,
}

/// One agent at one profile; all of its misreports are examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanUnit {
    pub profile: Vec<usize>,
    pub agent: usize,
}

/// A concrete (agent, profile, misreport) triple, as found by a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case {
    pub agent: usize,
    /// Truthful profile in textual form.
    pub profile: String,
    /// The agent's misreport in textual form.
    pub misreport: String,
    #[serde(skip)]
    pub truthful: Profile,
    #[serde(skip)]
    pub report: PrefOrder,
}

impl Case {
    pub fn new(setting: &Setting, truthful: Profile, agent: usize, report: PrefOrder) -> Self {
        Case {
            agent,
            profile: truthful.display(setting),
            misreport: report.display(setting),
            truthful,
            report,
        }
    }

    pub fn misreported(&self) -> Profile {
        self.truthful.with_report(self.agent, self.report.clone())
    }
}

/// Scan context: setting, indexed type space, and the units in scan order.
#[derive(Debug, Clone)]
pub struct ScanPlan {
    pub setting: Setting,
    pub space: TypeSpace,
    pub reduction: Reduction,
    pub units: Vec<ScanUnit>,
    pub profiles: usize,
}

impl ScanPlan {
    pub fn new(setting: &Setting, scope: &Scope, budget: u128) -> Result<Self> {
        let space = TypeSpace::new(setting.objects());
        let reduction = scope.reduction();
        let mut units = Vec::new();
        let profiles;
        match scope {
            Scope::Exhaustive(red) => {
                let count = profile_count(setting, *red);
                if count > budget {
                    return Err(Error::SettingTooLarge {
                        what: format!("exhaustive scan of {setting} ({red})"),
                        required: count,
                        budget,
                    });
                }
                let all = profile_indices(setting, *red);
                profiles = all.len();
                for (profile, _) in all {
                    match red {
                        Reduction::None => {
                            for agent in 0..profile.len() {
                                units.push(ScanUnit {
                                    profile: profile.clone(),
                                    agent,
                                });
                            }
                        }
                        Reduction::Anonymous => {
                            for agent in 0..profile.len() {
                                if agent == 0 || profile[agent] != profile[agent - 1] {
                                    units.push(ScanUnit {
                                        profile: profile.clone(),
                                        agent,
                                    });
                                }
                            }
                        }
                        Reduction::AnonymousNeutral => units.push(ScanUnit { profile, agent: 0 }),
                    }
                }
            }
            Scope::Profiles(list) => {
                profiles = list.len();
                for p in list {
                    if p.agents() != setting.agents() || p.objects() != setting.objects() {
                        return Err(Error::ProfileLength {
                            expected: setting.agents(),
                            found: p.agents(),
                        });
                    }
                    let idx = space.indices(p);
                    for agent in 0..idx.len() {
                        units.push(ScanUnit {
                            profile: idx.clone(),
                            agent,
                        });
                    }
                }
            }
        }
        Ok(ScanPlan {
            setting: setting.clone(),
            space,
            reduction,
            units,
            profiles,
        })
    }

    /// Misreport type indices for a unit, in increasing index order.
    pub fn misreports(&self, unit: &ScanUnit, which: Misreports) -> Vec<usize> {
        let truth = unit.profile[unit.agent];
        match which {
            Misreports::All => (0..self.space.len()).filter(|&t| t != truth).collect(),
            Misreports::Neighbors => {
                let mut v: Vec<usize> = self.space.neighbors(truth).iter().map(|n| n.0).collect();
                v.sort_unstable();
                v
            }
        }
    }

    /// 1-based rank of the swapped pair between a type and its neighbour.
    pub fn swap_rank(&self, truth: usize, neighbor: usize) -> Option<usize> {
        self.space
            .neighbors(truth)
            .iter()
            .find(|(t, _)| *t == neighbor)
            .map(|(_, k)| *k)
    }

    pub fn case(&self, unit: &ScanUnit, report: usize) -> Case {
        Case::new(
            &self.setting,
            self.profile(&unit.profile),
            unit.agent,
            self.space.get(report).clone(),
        )
    }

    pub fn profile(&self, indices: &[usize]) -> Profile {
        self.space.profile(indices)
    }

    pub fn with_report(unit: &ScanUnit, report: usize) -> Vec<usize> {
        let mut p = unit.profile.clone();
        p[unit.agent] = report;
        p
    }

    /// Cache keys needed to look up every (unit, misreport) pair.
    fn needed_keys(&self, which: Misreports) -> Vec<Vec<usize>> {
        match self.reduction {
            Reduction::None if self.units.len() == self.profiles * self.setting.agents() && self.is_full_space() => {
                profile_indices(&self.setting, Reduction::None)
                    .into_iter()
                    .map(|(p, _)| p)
                    .collect()
            }
            Reduction::None => {
                let mut keys: HashSet<Vec<usize>> = HashSet::new();
                for unit in &self.units {
                    keys.insert(unit.profile.clone());
                    for t in self.misreports(unit, which) {
                        keys.insert(Self::with_report(unit, t));
                    }
                }
                let mut v: Vec<_> = keys.into_iter().collect();
                v.sort();
                v
            }
            Reduction::Anonymous => profile_indices(&self.setting, Reduction::Anonymous)
                .into_iter()
                .map(|(p, _)| p)
                .collect(),
            Reduction::AnonymousNeutral => profile_indices(&self.setting, Reduction::AnonymousNeutral)
                .into_iter()
                .map(|(p, _)| p[1..].to_vec())
                .collect(),
        }
    }

    fn is_full_space(&self) -> bool {
        self.profiles as u128 == profile_count(&self.setting, Reduction::None)
    }
}

/// Allocation cache for one mechanism over one scan plan.
#[derive(Debug, Clone)]
pub struct AllocationTable {
    reduction: Reduction,
    n: usize,
    m: usize,
    entries: HashMap<Vec<usize>, Vec<Rational>>,
}

impl AllocationTable {
    /// Evaluates `mech` on every profile the plan can touch, in parallel.
    pub fn build(mech: &dyn Mechanism, plan: &ScanPlan, which: Misreports) -> Result<Self> {
        let keys = plan.needed_keys(which);
        let n = plan.setting.agents();
        let m = plan.setting.objects();
        let reduction = plan.reduction;
        let computed: Vec<Result<(Vec<usize>, Vec<Rational>)>> = keys
            .into_par_iter()
            .map(|key| {
                let indices = match reduction {
                    Reduction::AnonymousNeutral => {
                        let mut p = Vec::with_capacity(n);
                        p.push(0);
                        p.extend_from_slice(&key);
                        p
                    }
                    _ => key.clone(),
                };
                let profile = plan.profile(&indices);
                let x = mech.allocate(&plan.setting, &profile)?;
                let stored = match reduction {
                    Reduction::AnonymousNeutral => x.row(0).to_vec(),
                    _ => x.entries().to_vec(),
                };
                Ok((key, stored))
            })
            .collect();
        let mut entries = HashMap::with_capacity(computed.len());
        for item in computed {
            let (k, v) = item?;
            entries.insert(k, v);
        }
        Ok(AllocationTable {
            reduction,
            n,
            m,
            entries,
        })
    }

    /// Table of the hybrid `(1−β)·f + β·g`, combined entrywise.
    pub fn hybrid(f: &AllocationTable, g: &AllocationTable, beta: &Rational) -> Self {
        assert_eq!(f.reduction, g.reduction);
        if beta.is_zero() {
            return f.clone();
        }
        if beta.is_one() {
            return g.clone();
        }
        let keep = Rational::one() - beta;
        let entries = f
            .entries
            .par_iter()
            .map(|(k, fv)| {
                let gv = &g.entries[k];
                let mixed = fv.iter().zip(gv).map(|(a, b)| &keep * a + beta * b).collect();
                (k.clone(), mixed)
            })
            .collect();
        AllocationTable {
            reduction: f.reduction,
            n: f.n,
            m: f.m,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row of `agent` at `profile` (type indices), in original labels.
    pub fn row(&self, space: &TypeSpace, profile: &[usize], agent: usize) -> Vec<Rational> {
        let m = self.m;
        match self.reduction {
            Reduction::None => {
                let v = self.lookup(profile);
                v[agent * m..(agent + 1) * m].to_vec()
            }
            Reduction::Anonymous => {
                let mut key = profile.to_vec();
                key.sort_unstable();
                let pos = key.iter().position(|&t| t == profile[agent]).expect("type present");
                let v = self.lookup(&key);
                v[pos * m..(pos + 1) * m].to_vec()
            }
            Reduction::AnonymousNeutral => {
                let anchor = profile[agent];
                let mut key: Vec<usize> = profile
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != agent)
                    .map(|(_, &t)| space.relabel_to_identity_of(anchor, t))
                    .collect();
                key.sort_unstable();
                let canonical = self.lookup(&key);
                let sigma = space.get(anchor).positions();
                (0..m).map(|j| canonical[sigma[j]].clone()).collect()
            }
        }
    }

    fn lookup(&self, key: &[usize]) -> &Vec<Rational> {
        self.entries
            .get(key)
            .unwrap_or_else(|| panic!("profile {key:?} missing from allocation table ({} agents)", self.n))
    }
}
