//! The linear curves `x ↦ (x, x·y)` into `T^{n+1}` and grid probes of how
//! close their images come to a given point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CurveMap;
use crate::error::{Error, Result};
use crate::exterior::Covector;
use crate::manifold::{canonical_rep, torus_distance_unchecked, FormField, TargetManifold};
use crate::number::Scalar;

/// `f_y(x) = (x, x·y)` followed by the quotient `ℝ^{n+1} → T^{n+1}`.
#[derive(Debug, Clone)]
pub struct TorusLinearCurve {
    slope: Vec<Scalar>,
    curve: CurveMap,
}

impl TorusLinearCurve {
    pub fn new(slope: Vec<Scalar>) -> Result<Self> {
        let y: Vec<f64> = slope.iter().map(Scalar::value).collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { at: y });
        }
        let curve = CurveMap::torus_linear(y)?;
        Ok(TorusLinearCurve { slope, curve })
    }

    pub fn from_floats(y: &[f64]) -> Result<Self> {
        Self::new(y.iter().map(|&v| Scalar::Real(v)).collect())
    }

    pub fn slope(&self) -> &[Scalar] {
        &self.slope
    }

    pub fn slope_values(&self) -> &[f64] {
        self.curve.torus_slope().expect("torus linear curve")
    }

    pub fn n(&self) -> usize {
        self.slope.len()
    }

    pub fn target(&self) -> TargetManifold {
        TargetManifold::FlatTorus(self.n() + 1)
    }

    pub fn curve(&self) -> CurveMap {
        self.curve.clone()
    }

    pub fn curve_ref(&self) -> &CurveMap {
        &self.curve
    }

    /// `dx₁ ∧ … ∧ dxₙ` on `T^{n+1}`, whose pullback is the Euclidean volume.
    pub fn standard_form(&self) -> FormField {
        let n = self.n();
        let idx: Vec<usize> = (1..=n).collect();
        let cov = Covector::basis(n + 1, &idx).expect("valid basis");
        FormField::constant(self.target(), &cov).expect("constant form")
    }

    /// `(1 + |y|)ⁿ`
    pub fn distortion_bound(&self) -> f64 {
        let norm = self.slope_values().iter().map(|v| v * v).sum::<f64>().sqrt();
        (1.0 + norm).powi(self.n() as i32)
    }

    /// `(1 + |y|²)^{n/2}`, the exact pointwise quotient for the standard form.
    pub fn exact_distortion(&self) -> f64 {
        let sq = self.slope_values().iter().map(|v| v * v).sum::<f64>();
        (1.0 + sq).powf(self.n() as f64 / 2.0)
    }
}

/// A rectangular grid in ℝⁿ. Coordinate `j` takes the values
/// `lo_j + i·(hi_j − lo_j)/N_j` for `i = 0..=N_j`, so doubling `N_j` keeps
/// every old node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub intervals: Vec<usize>,
}

impl GridSpec {
    /// The cube `[lo, hi]ⁿ` with spacing as close to `step` as divides it.
    pub fn cube(n: usize, lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(hi >= lo) {
            return Err(Error::InvalidArgument(format!("grid [{lo}, {hi}] with step {step}")));
        }
        let count = ((hi - lo) / step).round().max(1.0) as usize;
        Ok(GridSpec { lo: vec![lo; n], hi: vec![hi; n], intervals: vec![count; n] })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.intervals.iter().map(|n| n + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() || self.lo.len() != self.intervals.len() {
            return Err(Error::DimensionMismatch("grid bounds and interval counts differ in length".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::InvalidArgument("grid bounds must be finite with lo ≤ hi".into()));
        }
        Ok(())
    }

    fn coordinate(&self, j: usize, i: usize) -> f64 {
        let n = self.intervals[j].max(1) as f64;
        self.lo[j] + (i as f64) * (self.hi[j] - self.lo[j]) / n
    }

    /// The `k`-th node in row-major order.
    pub fn node(&self, mut k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for j in (0..self.dim()).rev() {
            let m = self.intervals[j] + 1;
            out[j] = self.coordinate(j, k % m);
            k /= m;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub min_distance: f64,
    pub argmin: Vec<f64>,
    pub nodes: usize,
}

/// Minimum torus distance from `f_y(x)` to `v` over the grid nodes `x`.
pub fn density_probe(f: &TorusLinearCurve, v: &[f64], grid: &GridSpec) -> Result<ProbeResult> {
    grid.validate()?;
    let n = f.n();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch(format!("{}-dimensional grid for n = {n}", grid.dim())));
    }
    if v.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!("target point of length {}, expected {}", v.len(), n + 1)));
    }
    let target = canonical_rep(v);
    let y = f.slope_values();
    let total = grid.len();
    let (min_distance, k) = (0..total)
        .into_par_iter()
        .with_min_len(4096)
        .map(|k| {
            let mut p = grid.node(k);
            p.push(p.iter().zip(y).map(|(a, b)| a * b).sum());
            (torus_distance_unchecked(&p, &target), k)
        })
        // ties broken by index so the reported node does not depend on scheduling
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("grid has at least one node");
    Ok(ProbeResult { min_distance, argmin: grid.node(k), nodes: total })
}
