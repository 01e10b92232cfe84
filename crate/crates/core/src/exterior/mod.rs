//! Exterior algebra over ℝᵐ with the Euclidean metric and standard
//! orientation.
//!
//! Covectors are stored sparsely over strictly increasing multi-indices.
//! The comass norm is computed by ascent over orthonormal frames
//! ([`comass`]) and cross-checked by random frame sampling
//! ([`comass_oracle`]).

mod comass;
mod covector;
mod literal;

pub use comass::{comass, comass_oracle, pointwise_comass, ComassResult, OptimizerConfig};
pub use covector::{det, Covector, MultiIndex, PRUNE_THRESHOLD};
pub use literal::{parse_terms, LiteralTerm};

use crate::error::Result;

/// Exterior product `a ∧ b`.
pub fn wedge(a: &Covector, b: &Covector) -> Result<Covector> {
    a.wedge(b)
}

/// Hodge star with respect to the Euclidean metric and standard orientation.
pub fn hodge_star(a: &Covector) -> Covector {
    a.hodge_star()
}

/// Euclidean inner product over the orthonormal multi-index basis.
pub fn inner(a: &Covector, b: &Covector) -> Result<f64> {
    a.inner(b)
}
