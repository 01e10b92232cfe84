//! Numerical laboratory for signed quasiregular curves.
//!
//! * [`exterior`]: covectors, wedge, Hodge star, comass.
//! * [`manifold`]: Euclidean and flat-torus targets, differential form fields.
//! * [`curves`]: curve maps, pullback densities, distortion, the torus linear
//!   family with its density probes and rational obstruction sets.
//! * [`quadrature`]: ball and sphere integrals with error estimates.
//! * [`analysis`]: growth, reverse Hölder, higher integrability,
//!   equidistribution and sign checkers.

pub mod analysis;
pub mod curves;
pub mod error;
pub mod exterior;
pub mod manifold;
pub mod number;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
pub use exterior::{Covector, MultiIndex, OptimizerConfig};
pub use manifold::{Coefficient, FormField, TargetManifold};
pub use curves::{CurveMap, TorusLinearCurve};
pub use number::{Rational, Scalar};
pub use quadrature::{IntegralEstimate, QuadratureMethod, QuadratureSpec};
