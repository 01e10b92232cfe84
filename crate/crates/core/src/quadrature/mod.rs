//! Integrals over centered balls and spheres in ℝⁿ.
//!
//! Tensor-polar rules use Gauss–Legendre in the radius and [`sphere_rule`]
//! in the angles; their error bound is the gap to a half-budget run plus a
//! roundoff floor. Monte-carlo reports three standard errors.

mod rules;

pub use rules::{gauss_legendre, pairwise_sum, sphere_rule, unit_ball_volume, unit_sphere_area};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{pullback_eval, star_pullback, CurveMap};
use crate::error::{Error, Result};
use crate::exterior::det;
use crate::manifold::{FormField, DEFAULT_FD_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    TensorPolar,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    /// Radial Gauss–Legendre nodes (tensor-polar).
    pub radial: usize,
    /// Angular nodes (tensor-polar).
    pub angular: usize,
    /// Sample count (monte-carlo).
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: QuadratureMethod::TensorPolar,
            radial: 64,
            angular: 256,
            samples: 1_000_000,
            seed: 0,
            tol: 1e-6,
        }
    }
}

const MC_CHUNK: usize = 4096;

impl QuadratureSpec {
    /// Tensor-polar for `n ≤ 3`, monte-carlo above.
    pub fn default_for(n: usize) -> Self {
        let method = if n <= 3 { QuadratureMethod::TensorPolar } else { QuadratureMethod::MonteCarlo };
        QuadratureSpec { method, ..Default::default() }
    }

    pub fn tensor(radial: usize, angular: usize) -> Self {
        QuadratureSpec { method: QuadratureMethod::TensorPolar, radial, angular, ..Default::default() }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec { method: QuadratureMethod::MonteCarlo, samples, seed, ..Default::default() }
    }

    /// Nominal node or sample count.
    pub fn budget(&self) -> usize {
        match self.method {
            QuadratureMethod::TensorPolar => self.radial * self.angular,
            QuadratureMethod::MonteCarlo => self.samples,
        }
    }

    /// Rescales the node counts so that [`budget`](Self::budget) is about
    /// `total`, keeping the radial to angular ratio at 1:4.
    pub fn with_budget(mut self, total: usize) -> Self {
        match self.method {
            QuadratureMethod::TensorPolar => {
                self.radial = ((total as f64 / 4.0).sqrt().round() as usize).max(1);
                self.angular = (total / self.radial).max(1);
            }
            QuadratureMethod::MonteCarlo => self.samples = total,
        }
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.budget() == 0 {
            return Err(Error::InvalidArgument("quadrature budget must be at least 1".into()));
        }
        if self.method == QuadratureMethod::TensorPolar && !(2..=4).contains(&n) {
            return Err(Error::InvalidArgument(format!("tensor-polar quadrature needs 2 ≤ n ≤ 4, got n = {n}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension {n} < 2")));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub budget_used: usize,
}

impl IntegralEstimate {
    pub fn scaled(self, s: f64) -> Self {
        IntegralEstimate { value: s * self.value, error_bound: s.abs() * self.error_bound, ..self }
    }
}

/// A weighted node set: `Σ w_k g(x_k)`.
struct Rule {
    nodes: Vec<(Vec<f64>, f64)>,
}

impl Rule {
    fn apply<G>(&self, g: &G) -> Result<(f64, f64)>
    where
        G: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .map(|(x, w)| {
                let v = g(x)?;
                if !v.is_finite() {
                    return Err(Error::NonFinite { at: x.clone() });
                }
                Ok(w * v)
            })
            .collect::<Result<_>>()?;
        let abs: Vec<f64> = terms.iter().map(|t| t.abs()).collect();
        Ok((pairwise_sum(&terms), pairwise_sum(&abs)))
    }
}

fn roundoff_floor(nodes: usize, abs_sum: f64) -> f64 {
    ((nodes as f64).log2() + 1.0) * f64::EPSILON * abs_sum
}

fn ball_rule(center: &[f64], r: f64, radial: usize, angular: usize) -> Rule {
    let n = center.len();
    let radii = gauss_legendre(radial.max(1), 0.0, 1.0);
    let dirs = sphere_rule(n, angular);
    let rn = r.powi(n as i32);
    let mut nodes = Vec::with_capacity(radii.len() * dirs.len());
    for &(rho, wr) in &radii {
        let radial_weight = wr * rho.powi(n as i32 - 1) * rn;
        for (u, wu) in &dirs {
            let x = center.iter().zip(u).map(|(c, ui)| c + r * rho * ui).collect();
            nodes.push((x, radial_weight * wu));
        }
    }
    Rule { nodes }
}

fn tensor_estimate<F>(make: F, spec: &QuadratureSpec, g: &(dyn Fn(&[f64]) -> Result<f64> + Sync)) -> Result<IntegralEstimate>
where
    F: Fn(usize, usize) -> Rule,
{
    let full = make(spec.radial, spec.angular);
    let half = make((spec.radial / 2).max(1), (spec.angular / 2).max(1));
    let (value, abs) = full.apply(&g)?;
    let (coarse, _) = half.apply(&g)?;
    Ok(IntegralEstimate {
        value,
        error_bound: (value - coarse).abs() + roundoff_floor(full.nodes.len(), abs),
        budget_used: full.nodes.len() + half.nodes.len(),
    })
}

/// `mean ± 3·SE` of `scale · g(sample)` with chunked, per-chunk-seeded
/// streams so that the result depends only on the seed.
fn monte_carlo<S>(spec: &QuadratureSpec, scale: f64, draw: S, g: &(dyn Fn(&[f64]) -> Result<f64> + Sync)) -> Result<IntegralEstimate>
where
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let total = spec.samples;
    let chunks = total.div_ceil(MC_CHUNK);
    let values: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(total - c * MC_CHUNK);
            (0..len)
                .map(|_| {
                    let x = draw(&mut rng);
                    let v = g(&x)?;
                    if v.is_finite() { Ok(v) } else { Err(Error::NonFinite { at: x }) }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let flat: Vec<f64> = values.into_iter().flatten().collect();
    let mean = pairwise_sum(&flat) / total as f64;
    let dev: Vec<f64> = flat.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = if total > 1 { pairwise_sum(&dev) / (total - 1) as f64 } else { 0.0 };
    let se = (var / total as f64).sqrt();
    Ok(IntegralEstimate { value: scale * mean, error_bound: 3.0 * scale.abs() * se, budget_used: total })
}

fn gaussian_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive and finite, got {r}")));
    }
    Ok(())
}

/// `∫_{Bⁿ(center, r)} g`, or its average when `average` is set.
pub fn ball_integral<G>(g: G, center: &[f64], r: f64, spec: &QuadratureSpec, average: bool) -> Result<IntegralEstimate>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    try_ball_integral(|x| Ok(g(x)), center, r, spec, average)
}

/// [`ball_integral`] for integrands that can fail.
pub fn try_ball_integral<G>(g: G, center: &[f64], r: f64, spec: &QuadratureSpec, average: bool) -> Result<IntegralEstimate>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = center.len();
    spec.validate(n)?;
    check_radius(r)?;
    let volume = unit_ball_volume(n) * r.powi(n as i32);
    let est = match spec.method {
        QuadratureMethod::TensorPolar => tensor_estimate(|nr, na| ball_rule(center, r, nr, na), spec, &g)?,
        QuadratureMethod::MonteCarlo => monte_carlo(
            spec,
            volume,
            |rng| {
                let u = gaussian_direction(rng, n);
                let rho = r * rng.random::<f64>().powf(1.0 / n as f64);
                center.iter().zip(&u).map(|(c, ui)| c + rho * ui).collect()
            },
            &g,
        )?,
    };
    Ok(if average { est.scaled(1.0 / volume) } else { est })
}

/// Orthonormal basis `e₂ … eₙ` of `u⊥` with `det[u, e₂, …, eₙ] = +1`.
pub fn oriented_tangent_frame(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    // Householder reflection sending e₁ to ±u; its other columns span u⊥.
    let sign = if u[0] > 0.0 { -1.0 } else { 1.0 };
    let mut w: Vec<f64> = u.iter().map(|c| -sign * c).collect();
    w[0] += 1.0;
    let ww: f64 = w.iter().map(|c| c * c).sum();
    let mut cols: Vec<Vec<f64>> = (1..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    if ww > 0.0 { id - 2.0 * w[i] * w[j] / ww } else { id }
                })
                .collect()
        })
        .collect();
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        m.push(u[i]);
        for c in &cols {
            m.push(c[i]);
        }
    }
    if det(&m, n) < 0.0 {
        for x in cols.last_mut().expect("n ≥ 2") {
            *x = -*x;
        }
    }
    cols
}

/// `∫_{S^{n−1}(r)} f*τ` over the centered sphere, oriented by the outward
/// normal.
pub fn sphere_integral(f: &CurveMap, tau: &FormField, r: f64, spec: &QuadratureSpec) -> Result<IntegralEstimate> {
    let n = f.domain_dim();
    if tau.degree() + 1 != n {
        return Err(Error::DegreeMismatch { expected: n - 1, found: tau.degree() });
    }
    spec.validate(n)?;
    check_radius(r)?;
    let scale = r.powi(n as i32 - 1);
    // The integrand takes a unit direction.
    let integrand = |u: &[f64]| -> Result<f64> {
        let x: Vec<f64> = u.iter().map(|c| r * c).collect();
        Ok(scale * pullback_eval(f, tau, &x, &oriented_tangent_frame(u))?)
    };
    match spec.method {
        QuadratureMethod::TensorPolar => {
            let make = |_: usize, na: usize| Rule { nodes: sphere_rule(n, na) };
            let full = make(0, spec.angular.max(1) * spec.radial.max(1));
            let half = make(0, (spec.angular.max(1) * spec.radial.max(1) / 2).max(1));
            let (value, abs) = full.apply(&integrand)?;
            let (coarse, _) = half.apply(&integrand)?;
            Ok(IntegralEstimate {
                value,
                error_bound: (value - coarse).abs() + roundoff_floor(full.nodes.len(), abs),
                budget_used: full.nodes.len() + half.nodes.len(),
            })
        }
        QuadratureMethod::MonteCarlo => {
            monte_carlo(spec, unit_sphere_area(n), |rng| gaussian_direction(rng, n), &integrand)
        }
    }
}

/// Both sides of Stokes' identity on `B(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesCheck {
    pub sphere: IntegralEstimate,
    pub ball: IntegralEstimate,
    pub residual: f64,
    pub combined_bound: f64,
}

impl StokesCheck {
    pub fn holds(&self) -> bool {
        self.residual <= self.combined_bound
    }
}

/// Compares `∫_{S(r)} f*τ` with `∫_{B(r)} ⋆f*dτ`.
pub fn stokes_check(f: &CurveMap, tau: &FormField, r: f64, spec: &QuadratureSpec) -> Result<StokesCheck> {
    let dtau = tau.exterior_derivative_field(DEFAULT_FD_STEP)?;
    let sphere = sphere_integral(f, tau, r, spec)?;
    let ball = try_ball_integral(|x| star_pullback(f, &dtau, x), &vec![0.0; f.domain_dim()], r, spec, false)?;
    Ok(StokesCheck {
        sphere,
        ball,
        residual: (sphere.value - ball.value).abs(),
        combined_bound: sphere.error_bound + ball.error_bound,
    })
}

/// `Σ ln(b_i/a_i)` over the union of the intervals, which must lie in `[1, ∞)`.
pub fn log_measure(intervals: &[(f64, f64)]) -> Result<f64> {
    let mut iv: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for &(a, b) in intervals {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
        }
        if a < 1.0 {
            return Err(Error::InvalidArgument(format!("interval [{a}, {b}] starts below 1")));
        }
        iv.push((a, b));
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        cur = match cur {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += (cb / ca).ln();
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((a, b)) = cur {
        total += (b / a).ln();
    }
    Ok(total)
}
