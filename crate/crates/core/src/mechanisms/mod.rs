//! Mechanisms mapping a preference profile to a random allocation.

mod boston;
mod constant;
mod ps;
mod rank_value;
mod serial;
mod spec;

pub use boston::{abm, boston_outcome, nbm, BostonVariant};
pub use constant::constant_equal_shares;
pub use ps::{ps, ps_with_times, EatingTrace};
pub use rank_value::{rank_value, validate_valuation};
pub use serial::{all_orderings, rsd, serial_dictatorship, AgentOrdering, RsdEngine};
pub use spec::{Configured, EvalOptions, MechanismSpec};

use crate::error::Result;
use crate::model::{check_beta, convex_combine, Allocation, Profile, Setting};
use crate::rational::{format_rational, Rational};

/// A (randomized) mechanism: a pure function from profiles to allocations.
pub trait Mechanism: Send + Sync {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation>;

    /// Short name used in reports.
    fn describe(&self) -> String;
}

impl<M: Mechanism + ?Sized> Mechanism for &M {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation> {
        (**self).allocate(setting, profile)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation> {
        (**self).allocate(setting, profile)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// The β-hybrid `(1−β)·f + β·g` of two arbitrary mechanisms.
pub struct Hybrid<F, G> {
    f: F,
    g: G,
    beta: Rational,
}

impl<F: Mechanism, G: Mechanism> Hybrid<F, G> {
    pub fn new(f: F, g: G, beta: Rational) -> Result<Self> {
        check_beta(&beta)?;
        Ok(Hybrid { f, g, beta })
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }
}

impl<F: Mechanism, G: Mechanism> Mechanism for Hybrid<F, G> {
    fn allocate(&self, setting: &Setting, profile: &Profile) -> Result<Allocation> {
        use num_traits::{One, Zero};
        if self.beta.is_zero() {
            return self.f.allocate(setting, profile);
        }
        if self.beta.is_one() {
            return self.g.allocate(setting, profile);
        }
        let x = self.f.allocate(setting, profile)?;
        let y = self.g.allocate(setting, profile)?;
        convex_combine(&x, &y, &self.beta)
    }

    fn describe(&self) -> String {
        format!(
            "hybrid({},{},{})",
            self.f.describe(),
            self.g.describe(),
            format_rational(&self.beta)
        )
    }
}
