//! Exact hybrid mechanisms for one-sided matching.
//!
//! The crate evaluates random serial dictatorship, probabilistic serial,
//! the naive and adaptive Boston mechanisms, rank-value and constant
//! mechanisms, and convex combinations ("hybrids") of any two of them.
//! On top of that it offers exhaustive verifiers for the swap axioms and
//! for URBI(r)-partial strategyproofness, the maximal mixing factor of a
//! hybrid, and ordinal/rank dominance analysis. All arithmetic is exact.

/// Version tag carried by every serialized report.
pub const SCHEMA_VERSION: u32 = 1;

pub mod birkhoff;
pub mod efficiency;
pub mod enumerate;
pub mod error;
pub mod incentives;
pub mod mechanisms;
pub mod model;
pub mod rational;
pub mod scan;
pub mod solver;
pub mod text;

pub use enumerate::Reduction;
pub use error::{Error, Result};
pub use mechanisms::{Hybrid, Mechanism, MechanismSpec};
pub use model::{Allocation, PrefOrder, Profile, Setting, UtilityVector};
pub use rational::Rational;
pub use scan::Scope;
