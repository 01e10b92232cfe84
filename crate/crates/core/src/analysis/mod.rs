//! Checkers for growth, reverse Hölder, higher integrability,
//! equidistribution and sign conditions.
//!
//! Every verdict here is computed from finitely many quadrature nodes or
//! samples, so a pass is evidence rather than proof.

mod equi;
mod growth;
mod holder;
mod signed;

pub use equi::{default_delta, equidistribution_report, EquiReport, EquiRow};
pub use growth::{epsilon_and_constant, fast_growth_check, growth_function, FastGrowthVerdict, GrowthReport, GrowthRow};
pub use holder::{
    higher_integrability_check, prop4_check, reverse_holder_estimate, BallRecord, HigherIntegrabilityReport,
    HolderReport,
};
pub use signed::{
    monomial_representation, signed_check, torus_signed_representation, RepresentationKind, Sign, SignVerdict,
    SignedRepresentation, SignedTerm, TermVerdict,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curves::{star_pullback, CurveMap};
use crate::error::{Error, Result};
use crate::manifold::FormField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn centered(n: usize, radius: f64) -> Self {
        Ball { center: vec![0.0; n], radius }
    }

    pub fn half(&self) -> Ball {
        Ball { center: self.center.clone(), radius: self.radius / 2.0 }
    }
}

/// Balls over which the reverse Hölder quotients are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BallFamily {
    /// Centers uniform in `[center_lo, center_hi]ⁿ`, radii uniform in
    /// `[r_min, r_max]`.
    Random { dim: usize, count: usize, center_lo: f64, center_hi: f64, r_min: f64, r_max: f64, seed: u64 },
    /// `B(0, r)` for each listed radius.
    Concentric { dim: usize, radii: Vec<f64> },
    Explicit { balls: Vec<Ball> },
}

impl BallFamily {
    pub fn balls(&self) -> Result<Vec<Ball>> {
        let balls = match self {
            BallFamily::Random { dim, count, center_lo, center_hi, r_min, r_max, seed } => {
                if !(r_min > &0.0 && r_min <= r_max && center_lo <= center_hi) {
                    return Err(Error::InvalidArgument("random ball family needs 0 < r_min ≤ r_max".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| {
                        let center = (0..*dim)
                            .map(|_| if center_lo < center_hi { rng.random_range(*center_lo..*center_hi) } else { *center_lo })
                            .collect();
                        let radius = if r_min < r_max { rng.random_range(*r_min..*r_max) } else { *r_min };
                        Ball { center, radius }
                    })
                    .collect()
            }
            BallFamily::Concentric { dim, radii } => radii.iter().map(|&r| Ball::centered(*dim, r)).collect(),
            BallFamily::Explicit { balls } => balls.clone(),
        };
        if balls.is_empty() {
            return Err(Error::InvalidArgument("empty ball family".into()));
        }
        if balls.iter().any(|b| !(b.radius > 0.0)) {
            return Err(Error::InvalidArgument("ball radii must be positive".into()));
        }
        Ok(balls)
    }

    pub fn describe(&self) -> String {
        match self {
            BallFamily::Random { dim, count, center_lo, center_hi, r_min, r_max, seed } => format!(
                "{count} random balls in ℝ^{dim}, centers in [{center_lo}, {center_hi}], radii in [{r_min}, {r_max}] (seed {seed})"
            ),
            BallFamily::Concentric { radii, .. } => format!("centered balls with radii {radii:?}"),
            BallFamily::Explicit { balls } => format!("{} explicit balls", balls.len()),
        }
    }
}

pub(crate) fn check_top_degree(f: &CurveMap, omega: &FormField) -> Result<()> {
    if omega.target() != f.target() {
        return Err(Error::DimensionMismatch(format!(
            "form on {:?} with a map into {:?}",
            omega.target(),
            f.target()
        )));
    }
    if omega.degree() != f.domain_dim() {
        return Err(Error::DegreeMismatch { expected: f.domain_dim(), found: omega.degree() });
    }
    Ok(())
}

pub(crate) fn density<'a>(f: &'a CurveMap, omega: &'a FormField) -> impl Fn(&[f64]) -> Result<f64> + Sync + 'a {
    move |x| star_pullback(f, omega, x)
}
