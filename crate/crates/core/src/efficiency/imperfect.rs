use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::{ordinal_dominance, rank_dominance, DominanceResult};
use crate::enumerate::{profile_count, profile_indices, Reduction, TypeSpace};
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::Setting;
use crate::scan::DEFAULT_PROFILE_BUDGET;
use crate::SCHEMA_VERSION;

/// How many example profiles a report keeps per class.
const EXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    Ordinal,
    Rank,
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinal" => Ok(Notion::Ordinal),
            "rank" => Ok(Notion::Rank),
            _ => Err(Error::parse(0, format!("unknown dominance notion '{s}'"))),
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::Ordinal => "ordinal",
            Notion::Rank => "rank",
        })
    }
}

/// Verdict of `g` against `f` at one (canonical) profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileClass {
    pub profile: Vec<usize>,
    pub multiplicity: u128,
    pub result: DominanceResult,
}

/// Classifies every profile (up to `reduction`) by how `g(t)` compares
/// with `f(t)`.
pub fn dominance_classes(
    g: &dyn Mechanism,
    f: &dyn Mechanism,
    setting: &Setting,
    notion: Notion,
    reduction: Reduction,
) -> Result<Vec<ProfileClass>> {
    let count = profile_count(setting, reduction);
    if count > DEFAULT_PROFILE_BUDGET {
        return Err(Error::SettingTooLarge {
            what: format!("dominance scan of {setting} ({reduction})"),
            required: count,
            budget: DEFAULT_PROFILE_BUDGET,
        });
    }
    let space = TypeSpace::new(setting.objects());
    profile_indices(setting, reduction)
        .into_par_iter()
        .map(|(indices, multiplicity)| {
            let profile = space.profile(&indices);
            let x = g.allocate(setting, &profile)?;
            let y = f.allocate(setting, &profile)?;
            let result = match notion {
                Notion::Ordinal => ordinal_dominance(&x, &y, &profile)?,
                Notion::Rank => rank_dominance(&x, &y, &profile)?,
            };
            Ok(ProfileClass {
                profile: indices,
                multiplicity,
                result,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImperfectVerdict {
    /// No violations and at least one profile of strict dominance.
    Strict,
    /// No violations.
    Weak,
    /// `f` strictly dominates `g` somewhere.
    None,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub g_strict: u128,
    pub equal: u128,
    pub incomparable: u128,
    /// Profiles where `f` strictly dominates `g`.
    pub violations: u128,
}

impl ClassCounts {
    fn add(&mut self, r: DominanceResult, weight: u128) {
        match r {
            DominanceResult::StrictDominates => self.g_strict += weight,
            DominanceResult::Equal => self.equal += weight,
            DominanceResult::Incomparable => self.incomparable += weight,
            DominanceResult::StrictDominated => self.violations += weight,
        }
    }

    pub fn total(&self) -> u128 {
        self.g_strict + self.equal + self.incomparable + self.violations
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ImperfectDominanceReport {
    pub schema_version: u32,
    pub g: String,
    pub f: String,
    pub setting: Setting,
    pub notion: Notion,
    pub reduction: Reduction,
    pub verdict: ImperfectVerdict,
    /// Counts over all profiles (multiplicities applied).
    pub profiles: ClassCounts,
    /// Counts over the canonical profiles actually evaluated.
    pub canonical: ClassCounts,
    pub strict_examples: Vec<String>,
    pub violation_examples: Vec<String>,
}

pub fn imperfect_dominance_scan(
    g: &dyn Mechanism,
    f: &dyn Mechanism,
    setting: &Setting,
    notion: Notion,
    reduction: Reduction,
) -> Result<ImperfectDominanceReport> {
    let classes = dominance_classes(g, f, setting, notion, reduction)?;
    let space = TypeSpace::new(setting.objects());
    let mut profiles = ClassCounts::default();
    let mut canonical = ClassCounts::default();
    let mut strict_examples = Vec::new();
    let mut violation_examples = Vec::new();
    for c in &classes {
        profiles.add(c.result, c.multiplicity);
        canonical.add(c.result, 1);
        let bucket = match c.result {
            DominanceResult::StrictDominates => &mut strict_examples,
            DominanceResult::StrictDominated => &mut violation_examples,
            _ => continue,
        };
        if bucket.len() < EXAMPLES {
            bucket.push(space.profile(&c.profile).display(setting));
        }
    }
    let verdict = if profiles.violations > 0 {
        ImperfectVerdict::None
    } else if profiles.g_strict > 0 {
        ImperfectVerdict::Strict
    } else {
        ImperfectVerdict::Weak
    };
    Ok(ImperfectDominanceReport {
        schema_version: SCHEMA_VERSION,
        g: g.describe(),
        f: f.describe(),
        setting: setting.clone(),
        notion,
        reduction,
        verdict,
        profiles,
        canonical,
        strict_examples,
        violation_examples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismSpec;

    #[test]
    fn self_comparison_is_all_equal() {
        let s = Setting::unit(3, 3).unwrap();
        let r = imperfect_dominance_scan(
            &MechanismSpec::Ps,
            &MechanismSpec::Ps,
            &s,
            Notion::Ordinal,
            Reduction::None,
        )
        .unwrap();
        assert_eq!(r.verdict, ImperfectVerdict::Weak);
        assert_eq!(r.profiles.equal, 216);
        assert_eq!(r.profiles.total(), 216);
    }

    #[test]
    fn reductions_give_the_same_weighted_counts() {
        let s = Setting::unit(3, 3).unwrap();
        let full = imperfect_dominance_scan(
            &MechanismSpec::Ps,
            &MechanismSpec::Rsd,
            &s,
            Notion::Ordinal,
            Reduction::None,
        )
        .unwrap();
        for red in [Reduction::Anonymous, Reduction::AnonymousNeutral] {
            let r =
                imperfect_dominance_scan(&MechanismSpec::Ps, &MechanismSpec::Rsd, &s, Notion::Ordinal, red).unwrap();
            assert_eq!(r.profiles, full.profiles);
        }
    }
}
