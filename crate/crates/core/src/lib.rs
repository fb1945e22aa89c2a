//! One-way sensitivity analysis of discrete Bayesian networks.
//!
//! The crate derives exact sensitivity functions `f(x) = (c1·x + c2) / (c3·x + c4)`
//! for a single CPT parameter under proportional co-variation, and computes bounds
//! that hold for every evidence profile: hyperbolic and linear envelopes through
//! `(x0, p0)`, upper bounds on sensitivity values, and minimum admissible deviations.
//! The [`sweep`] module enumerates evidence profiles and checks every bound against
//! the exact functions.

pub mod cli;
pub mod envelope;
pub mod error;
pub mod inference;
pub mod network;
pub mod roots;
pub mod sensfun;
pub mod sweep;

pub use error::{Error, Result};
pub use network::{DiscreteNetwork, EvidenceProfile, ParameterRef, Variable};
