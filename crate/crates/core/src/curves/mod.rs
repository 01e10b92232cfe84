//! Curve maps `f: ℝⁿ → N`, their differentials, pullback densities and
//! distortion quotients.

mod obstruction;
mod torus;

pub use obstruction::{rational_obstruction, ObstructionSet};
pub use torus::{density_probe, GridSpec, ProbeResult, TorusLinearCurve};

use std::sync::Arc;

pub use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{pointwise_comass, OptimizerConfig};
use crate::manifold::{FormField, TargetManifold, DEFAULT_FD_STEP};
use crate::sampling::SampleSpec;

/// Densities at or below `η · (comass · ‖Df‖ⁿ)` count as degenerate.
pub const DEGENERATE_ETA: f64 = 1e-12;


type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type DiffFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
pub enum CurveKind {
    Identity,
    /// `x ↦ c·x`
    Scaling(f64),
    /// `x ↦ A x` with `A` of shape `m × n`.
    Linear(DMatrix<f64>),
    /// `x ↦ (x₁², x₂, …, xₙ)`
    Polynomial,
    Constant(Vec<f64>),
    /// `x ↦ (x, x·y)` in covering coordinates of `T^{n+1}`.
    TorusLinear(Vec<f64>),
    Custom { eval: MapFn, differential: Option<DiffFn> },
}

impl std::fmt::Debug for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveKind::Identity => write!(f, "Identity"),
            CurveKind::Scaling(c) => write!(f, "Scaling({c})"),
            CurveKind::Linear(a) => write!(f, "Linear({}×{})", a.nrows(), a.ncols()),
            CurveKind::Polynomial => write!(f, "Polynomial"),
            CurveKind::Constant(p) => write!(f, "Constant({p:?})"),
            CurveKind::TorusLinear(y) => write!(f, "TorusLinear({y:?})"),
            CurveKind::Custom { differential, .. } => {
                write!(f, "Custom(analytic differential: {})", differential.is_some())
            }
        }
    }
}

/// A smooth map `ℝⁿ → N` with values in covering coordinates.
#[derive(Debug, Clone)]
pub struct CurveMap {
    domain_dim: usize,
    target: TargetManifold,
    kind: CurveKind,
    pub fd_step: f64,
}

impl CurveMap {
    fn build(domain_dim: usize, target: TargetManifold, kind: CurveKind) -> Result<Self> {
        if domain_dim < 2 {
            return Err(Error::InvalidArgument(format!("domain dimension {domain_dim} < 2")));
        }
        if target.dim() < domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "target dimension {} below domain dimension {domain_dim}",
                target.dim()
            )));
        }
        Ok(CurveMap { domain_dim, target, kind, fd_step: DEFAULT_FD_STEP })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::build(n, TargetManifold::Euclidean(n), CurveKind::Identity)
    }

    pub fn scaling(n: usize, c: f64) -> Result<Self> {
        Self::build(n, TargetManifold::Euclidean(n), CurveKind::Scaling(c))
    }

    /// `x ↦ A x` into `target`, `A` of shape `m × n`.
    pub fn linear(a: DMatrix<f64>, target: TargetManifold) -> Result<Self> {
        if a.nrows() != target.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix into a {}-dimensional target",
                a.nrows(),
                a.ncols(),
                target.dim()
            )));
        }
        Self::build(a.ncols(), target, CurveKind::Linear(a))
    }

    pub fn polynomial_demo(n: usize) -> Result<Self> {
        Self::build(n, TargetManifold::Euclidean(n), CurveKind::Polynomial)
    }

    pub fn constant(n: usize, point: Vec<f64>, target: TargetManifold) -> Result<Self> {
        if point.len() != target.dim() {
            return Err(Error::DimensionMismatch("constant value length differs from target dimension".into()));
        }
        Self::build(n, target, CurveKind::Constant(point))
    }

    pub fn custom<F>(n: usize, target: TargetManifold, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::build(n, target, CurveKind::Custom { eval: Arc::new(eval), differential: None })
    }

    /// Attaches an analytic differential to a custom map.
    pub fn with_differential<D>(mut self, d: D) -> Self
    where
        D: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        if let CurveKind::Custom { differential, .. } = &mut self.kind {
            *differential = Some(Arc::new(d));
        }
        self
    }

    pub(crate) fn torus_linear(y: Vec<f64>) -> Result<Self> {
        let n = y.len();
        Self::build(n, TargetManifold::FlatTorus(n + 1), CurveKind::TorusLinear(y))
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target(&self) -> &TargetManifold {
        &self.target
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Slope `y` when this is a torus linear curve.
    pub fn torus_slope(&self) -> Option<&[f64]> {
        match &self.kind {
            CurveKind::TorusLinear(y) => Some(y),
            _ => None,
        }
    }

    /// Whether the differential does not depend on the point.
    pub fn has_constant_differential(&self) -> bool {
        matches!(
            self.kind,
            CurveKind::Identity
                | CurveKind::Scaling(_)
                | CurveKind::Linear(_)
                | CurveKind::Constant(_)
                | CurveKind::TorusLinear(_)
        )
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} in a {}-dimensional domain",
                x.len(),
                self.domain_dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { at: x.to_vec() });
        }
        Ok(())
    }

    fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            CurveKind::Identity => x.to_vec(),
            CurveKind::Scaling(c) => x.iter().map(|v| c * v).collect(),
            CurveKind::Linear(a) => (a * nalgebra::DVector::from_column_slice(x)).iter().copied().collect(),
            CurveKind::Polynomial => {
                let mut out = x.to_vec();
                out[0] = x[0] * x[0];
                out
            }
            CurveKind::Constant(p) => p.clone(),
            CurveKind::TorusLinear(y) => {
                let mut out = x.to_vec();
                out.push(x.iter().zip(y).map(|(a, b)| a * b).sum());
                out
            }
            CurveKind::Custom { eval, .. } => eval(x),
        }
    }

    /// `f(x)` in covering coordinates.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let v = self.eval_unchecked(x);
        if v.len() != self.target.dim() {
            return Err(Error::DimensionMismatch(format!(
                "evaluator returned {} coordinates for a {}-dimensional target",
                v.len(),
                self.target.dim()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { at: x.to_vec() });
        }
        Ok(v)
    }

    /// `Df(x)` (`m × n`): analytic when known, central differences otherwise.
    pub fn differential(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let (m, n) = (self.target.dim(), self.domain_dim);
        let d = match &self.kind {
            CurveKind::Identity => DMatrix::identity(n, n),
            CurveKind::Scaling(c) => DMatrix::identity(n, n) * *c,
            CurveKind::Linear(a) => a.clone(),
            CurveKind::Polynomial => {
                let mut d = DMatrix::identity(n, n);
                d[(0, 0)] = 2.0 * x[0];
                d
            }
            CurveKind::Constant(_) => DMatrix::zeros(m, n),
            CurveKind::TorusLinear(y) => {
                let mut d = DMatrix::zeros(n + 1, n);
                for j in 0..n {
                    d[(j, j)] = 1.0;
                    d[(n, j)] = y[j];
                }
                d
            }
            CurveKind::Custom { differential: Some(df), .. } => df(x),
            CurveKind::Custom { differential: None, .. } => return self.differential_fd(x),
        };
        if d.nrows() != m || d.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "differential of shape {}×{}, expected {m}×{n}",
                d.nrows(),
                d.ncols()
            )));
        }
        Ok(d)
    }

    /// `Df(x)` by central differences with step `fd_step`, regardless of
    /// whether an analytic rule exists.
    pub fn differential_fd(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let h = self.fd_step;
        let (m, n) = (self.target.dim(), self.domain_dim);
        let mut d = DMatrix::zeros(m, n);
        for j in 0..n {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[j] += h;
            q[j] -= h;
            let fp = self.eval(&p)?;
            let fq = self.eval(&q)?;
            for i in 0..m {
                d[(i, j)] = (fp[i] - fq[i]) / (2.0 * h);
            }
        }
        Ok(d)
    }
}

/// Largest singular value.
pub fn operator_norm(d: &DMatrix<f64>) -> f64 {
    if d.is_empty() {
        return 0.0;
    }
    d.singular_values().iter().fold(0.0, |m, s| m.max(*s))
}

fn check_form_on(f: &CurveMap, form: &FormField) -> Result<()> {
    if form.target() != f.target() {
        return Err(Error::DimensionMismatch(format!(
            "form on {:?} pulled back by a map into {:?}",
            form.target(),
            f.target()
        )));
    }
    Ok(())
}

/// `⋆f*ω` at `x`: `ω_{f(x)}(∂₁f, …, ∂ₙf)`.
pub fn star_pullback(f: &CurveMap, omega: &FormField, x: &[f64]) -> Result<f64> {
    check_form_on(f, omega)?;
    if omega.degree() != f.domain_dim() {
        return Err(Error::DegreeMismatch { expected: f.domain_dim(), found: omega.degree() });
    }
    let d = f.differential(x)?;
    omega.eval(&f.eval(x)?)?.apply(&d)
}

/// `(f*τ)_x(v₁, …, v_k) = τ_{f(x)}(Df v₁, …, Df v_k)`.
pub fn pullback_eval(f: &CurveMap, tau: &FormField, x: &[f64], vectors: &[Vec<f64>]) -> Result<f64> {
    check_form_on(f, tau)?;
    if vectors.len() != tau.degree() {
        return Err(Error::DegreeMismatch { expected: tau.degree(), found: vectors.len() });
    }
    let n = f.domain_dim();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("tangent vectors must have length {n}")));
    }
    let d = f.differential(x)?;
    let v = DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    tau.eval(&f.eval(x)?)?.apply(&(d * v))
}

/// Pointwise distortion quotient or its failure mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum DistortionValue {
    Quotient(f64),
    Degenerate,
    SignViolation(f64),
}

fn quotient_from_parts(comass: f64, opnorm: f64, n: usize, density: f64) -> DistortionValue {
    let numerator = comass * opnorm.powi(n as i32);
    if density < -DEGENERATE_ETA * numerator {
        DistortionValue::SignViolation(density)
    } else if density <= DEGENERATE_ETA * numerator {
        DistortionValue::Degenerate
    } else {
        DistortionValue::Quotient(numerator / density)
    }
}

/// `‖ω_{f(x)}‖ · ‖Df(x)‖ⁿ / ⋆f*ω(x)`.
pub fn distortion_quotient(
    f: &CurveMap,
    omega: &FormField,
    x: &[f64],
    cfg: &OptimizerConfig,
) -> Result<DistortionValue> {
    let density = star_pullback(f, omega, x)?;
    let comass = pointwise_comass(&omega.eval(&f.eval(x)?)?, cfg);
    let opnorm = operator_norm(&f.differential(x)?);
    Ok(quotient_from_parts(comass, opnorm, f.domain_dim(), density))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub samples: String,
    pub evaluated: usize,
    pub degenerate: usize,
    /// Supremum of the sampled quotients; `None` if every sample was degenerate.
    pub k_hat: Option<f64>,
    pub argmax: Option<Vec<f64>>,
    /// `(1 + |y|)ⁿ` for torus linear curves.
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
}

/// Supremum of the distortion quotient over a sample set. A negative
/// density anywhere aborts with [`Error::SignViolation`].
pub fn distortion_sup(
    f: &CurveMap,
    omega: &FormField,
    samples: &SampleSpec,
    cfg: &OptimizerConfig,
) -> Result<DistortionReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    check_form_on(f, omega)?;
    if omega.degree() != f.domain_dim() {
        return Err(Error::DegreeMismatch { expected: f.domain_dim(), found: omega.degree() });
    }
    let points = samples.points();
    let n = f.domain_dim();
    let constant_comass = if omega.is_constant() {
        Some(pointwise_comass(&omega.eval(&vec![0.0; f.target().dim()])?, cfg))
    } else {
        None
    };
    let values: Vec<DistortionValue> = points
        .par_iter()
        .map(|x| {
            let fx = f.eval(x)?;
            let d = f.differential(x)?;
            let cov = omega.eval(&fx)?;
            let density = cov.apply(&d)?;
            let comass = constant_comass.unwrap_or_else(|| pointwise_comass(&cov, cfg));
            Ok(quotient_from_parts(comass, operator_norm(&d), n, density))
        })
        .collect::<Result<_>>()?;

    let mut k_hat: Option<(f64, usize)> = None;
    let mut degenerate = 0;
    for (i, v) in values.iter().enumerate() {
        match *v {
            DistortionValue::SignViolation(density) => {
                return Err(Error::SignViolation { at: points[i].clone(), density })
            }
            DistortionValue::Degenerate => degenerate += 1,
            DistortionValue::Quotient(q) => {
                if k_hat.is_none_or(|(best, _)| q > best) {
                    k_hat = Some((q, i));
                }
            }
        }
    }
    let bound = f.torus_slope().map(|y| {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        (1.0 + norm).powi(n as i32)
    });
    let within_bound = match (bound, k_hat) {
        (Some(b), Some((k, _))) => Some(k <= b),
        _ => None,
    };
    Ok(DistortionReport {
        samples: samples.describe(),
        evaluated: points.len(),
        degenerate,
        k_hat: k_hat.map(|(k, _)| k),
        argmax: k_hat.map(|(_, i)| points[i].clone()),
        bound,
        within_bound,
    })
}
