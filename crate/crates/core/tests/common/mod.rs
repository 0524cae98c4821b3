#![allow(dead_code)]

use hybrid_core::mechanisms::{constant_equal_shares, Mechanism};
use hybrid_core::rational::{ratio, Rational};
use hybrid_core::text::parse_profile;
use hybrid_core::{Allocation, Profile, Result, Setting};

pub const SIX_AGENT_PROFILE: &str = "a>b>c>d>e>f;a>b>c>d>e>f;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e";
pub const SIX_AGENT_LIE: &str = "a>b>d>c>e>f";

pub fn six_agent() -> (Setting, Profile) {
    let s = Setting::unit(6, 6).unwrap();
    let p = parse_profile(&s, SIX_AGENT_PROFILE).unwrap();
    (s, p)
}

pub fn rows(rows: &[&[(i64, i64)]]) -> Allocation {
    Allocation::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn row(entries: &[(i64, i64)]) -> Vec<Rational> {
    entries.iter().map(|&(p, q)| ratio(p, q)).collect()
}

/// Equal shares, except that agent 0 gets an extra 1/6 of its top object
/// (paid for with its bottom object, agent 1 taking the other side)
/// whenever its second choice has a larger index than its third. Swapping
/// ranks 2 and 3 thus moves agent 0's top-object share, so the mechanism
/// is not weakly invariant.
pub struct TiltedShares;

impl Mechanism for TiltedShares {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation> {
        let mut x = constant_equal_shares(setting);
        let t = profile.pref(0);
        if profile.agents() >= 2 && t.len() >= 3 && t.choice(2) > t.choice(3) {
            let top = t.choice(1);
            let bottom = t.choice(t.len());
            let tilt = ratio(1, 6);
            *x.get_mut(0, top) += &tilt;
            *x.get_mut(0, bottom) -= &tilt;
            *x.get_mut(1, top) -= &tilt;
            *x.get_mut(1, bottom) += &tilt;
        }
        Ok(x)
    }

    fn describe(&self) -> String {
        "tilted".into()
    }
}
