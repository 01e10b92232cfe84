//! Target manifolds and differential form fields on them.

mod coefficient;
mod form;

pub use coefficient::Coefficient;
pub use form::{FormField, FormTerm, DEFAULT_FD_STEP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{pointwise_comass, OptimizerConfig};
use crate::sampling::uniform_box_points;

/// Euclidean space ℝᵐ or the flat torus ℝᵐ/ℤᵐ. Points on the torus are
/// always handled in covering coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dim", rename_all = "snake_case")]
pub enum TargetManifold {
    Euclidean(usize),
    FlatTorus(usize),
}

impl TargetManifold {
    pub fn dim(&self) -> usize {
        match *self {
            TargetManifold::Euclidean(m) | TargetManifold::FlatTorus(m) => m,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, TargetManifold::FlatTorus(_))
    }

    /// Riemannian distance: plain Euclidean on ℝᵐ, [`torus_distance`] on the torus.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            TargetManifold::Euclidean(_) => Ok(euclidean_distance(a, b)),
            TargetManifold::FlatTorus(_) => torus_distance(self, a, b),
        }
    }
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Componentwise reduction to `[0, 1)`.
pub fn canonical_rep(a: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|&x| {
            let r = x - x.floor();
            // x slightly below an integer can round up to exactly 1
            if r >= 1.0 { 0.0 } else { r }
        })
        .collect()
}

/// Flat-torus distance `min_k |a − b − k|` over the 3ᵐ lattice translates
/// nearest the difference of canonical representatives.
///
/// The squared norm separates over coordinates, so the search over
/// `k ∈ {−1, 0, 1}ᵐ` is done one coordinate at a time.
pub fn torus_distance(target: &TargetManifold, a: &[f64], b: &[f64]) -> Result<f64> {
    let m = match target {
        TargetManifold::FlatTorus(m) => *m,
        TargetManifold::Euclidean(_) => {
            return Err(Error::UnsupportedTarget(
                "torus distance requested on a Euclidean target".into(),
            ))
        }
    };
    if a.len() != m || b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "points of length {} and {} on T^{m}",
            a.len(),
            b.len()
        )));
    }
    Ok(torus_distance_unchecked(a, b))
}

pub(crate) fn torus_distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = (x - x.floor()) - (y - y.floor());
            let best = [d - 1.0, d, d + 1.0].iter().fold(f64::INFINITY, |m, t| m.min(t.abs()));
            best * best
        })
        .sum::<f64>()
        .sqrt()
}

/// Where [`inf_comass`] draws its samples.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleRegion {
    /// The fundamental domain `[0,1)ᵐ` (flat tori).
    FundamentalDomain,
    /// A box `[lo, hi]ᵐ` (Euclidean targets).
    Box { lo: f64, hi: f64 },
    /// Explicit points in covering coordinates.
    Points(Vec<Vec<f64>>),
}

/// Minimum of the pointwise comass over `samples` points. Constant fields
/// are evaluated once.
pub fn inf_comass(
    form: &FormField,
    samples: usize,
    region: &SampleRegion,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let m = form.target().dim();
    if form.is_constant() {
        let at = vec![0.0; m];
        return Ok(pointwise_comass(&form.eval(&at)?, cfg));
    }
    let points = match region {
        SampleRegion::FundamentalDomain => uniform_box_points(m, 0.0, 1.0, samples.max(1), cfg.seed),
        SampleRegion::Box { lo, hi } => uniform_box_points(m, *lo, *hi, samples.max(1), cfg.seed),
        SampleRegion::Points(p) => p.clone(),
    };
    let mut inf = f64::INFINITY;
    for p in &points {
        inf = inf.min(pointwise_comass(&form.eval(p)?, cfg));
    }
    Ok(inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: TargetManifold = TargetManifold::FlatTorus(1);
    const T2: TargetManifold = TargetManifold::FlatTorus(2);

    /// Distance by brute force over all 3ᵐ lattice shifts.
    fn brute_torus_distance(a: &[f64], b: &[f64]) -> f64 {
        let ca = canonical_rep(a);
        let cb = canonical_rep(b);
        let m = a.len();
        let mut best = f64::INFINITY;
        for code in 0..3usize.pow(m as u32) {
            let mut c = code;
            let mut s = 0.0;
            for i in 0..m {
                let k = (c % 3) as f64 - 1.0;
                c /= 3;
                let d = ca[i] - cb[i] - k;
                s += d * d;
            }
            best = best.min(s.sqrt());
        }
        best
    }

    #[test]
    fn distance_examples() {
        assert_eq!(torus_distance(&T2, &[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
        let d = torus_distance(&T1, &[0.9], &[0.0]).unwrap();
        assert!((d - brute_torus_distance(&[0.9], &[0.0])).abs() < 1e-15);
        assert!((d - 0.1).abs() < 1e-12);
        let d = torus_distance(&T2, &[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(torus_distance(&TargetManifold::Euclidean(2), &[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(torus_distance(&T2, &[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn separable_search_matches_brute_force() {
        let pts = uniform_box_points(3, -3.0, 3.0, 200, 5);
        for w in pts.windows(2) {
            let t = torus_distance(&TargetManifold::FlatTorus(3), &w[0], &w[1]).unwrap();
            assert!((t - brute_torus_distance(&w[0], &w[1])).abs() < 1e-14);
        }
    }

    #[test]
    fn canonical_rep_examples() {
        assert_eq!(canonical_rep(&[0.25, 0.75]), vec![0.25, 0.75]);
        assert_eq!(canonical_rep(&[1.25, -0.25]), vec![0.25, 0.75]);
        let r = canonical_rep(&[2f64.sqrt(), 3f64.sqrt()]);
        assert!((r[0] - 0.41421356).abs() < 1e-8 && (r[1] - 0.73205081).abs() < 1e-8);
        assert_eq!(canonical_rep(&[-1e-18]), vec![0.0]);
    }

    #[test]
    fn euclidean_distance_routes_separately() {
        let e = TargetManifold::Euclidean(2);
        assert_eq!(e.distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert!((T2.distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap()).abs() < 1e-15);
    }
}
