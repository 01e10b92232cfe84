//! Comass norm `max |a(v₁,…,v_k)|` over orthonormal k-frames.
//!
//! The objective `F(V) = Σ_I a_I det(V_I)` is multilinear in the columns of
//! the `m × k` frame `V`. [`comass`] runs projected gradient ascent on the
//! Stiefel manifold with a QR retraction and Armijo backtracking; random
//! restarts run in parallel with per-restart streams derived from the seed.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::covector::{det, Covector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 64, tol: 1e-8, max_iter: 500, seed: 0 }
    }
}

/// Outcome of a comass computation. `value` is `|a(frame)|` evaluated at an
/// orthonormal frame, hence a lower bound for the true comass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComassResult {
    pub value: f64,
    /// Columns of the best frame found.
    pub frame: Vec<Vec<f64>>,
    pub restarts: usize,
    pub iterations: usize,
}

fn frame_columns(v: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..v.ncols()).map(|j| v.column(j).iter().copied().collect()).collect()
}

/// Q factor of a thin QR decomposition with a positive R diagonal.
fn orthonormalize(v: DMatrix<f64>) -> DMatrix<f64> {
    let qr = v.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn random_frame(rng: &mut ChaCha8Rng, m: usize, k: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(m, k, |_, _| StandardNormal.sample(rng));
    orthonormalize(g)
}

/// Value and Euclidean gradient of `F(V) = Σ_I a_I det(V_I)`.
fn value_and_gradient(a: &Covector, v: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let k = a.degree();
    let mut grad = DMatrix::zeros(v.nrows(), k);
    let mut value = 0.0;
    let mut block = vec![0.0; k * k];
    let mut minor = vec![0.0; (k - 1) * (k - 1)];
    for (idx, coeff) in a.terms() {
        let rows: Vec<usize> = idx.indices().map(|i| i - 1).collect();
        for (r, &row) in rows.iter().enumerate() {
            for c in 0..k {
                block[r * k + c] = v[(row, c)];
            }
        }
        value += coeff * det(&block, k);
        for (p, &row) in rows.iter().enumerate() {
            for j in 0..k {
                let mut n = 0;
                for r in (0..k).filter(|&r| r != p) {
                    for c in (0..k).filter(|&c| c != j) {
                        minor[n] = block[r * k + c];
                        n += 1;
                    }
                }
                let sign = if (p + j) % 2 == 0 { 1.0 } else { -1.0 };
                grad[(row, j)] += coeff * sign * det(&minor, k - 1);
            }
        }
    }
    (value, grad)
}

/// Ascent of `F²/2` from `start`; returns `(|F|, frame, iterations)`.
fn ascend(a: &Covector, start: DMatrix<f64>, cfg: &OptimizerConfig) -> (f64, DMatrix<f64>, usize) {
    let mut v = start;
    let (mut f, mut g) = value_and_gradient(a, &v);
    let mut step = 1.0;
    let mut iters = 0;
    while iters < cfg.max_iter {
        iters += 1;
        // ascent direction of F²/2, or of F itself at an exact zero
        let eg = if f == 0.0 { g.clone() } else { &g * f };
        let vtg = v.transpose() * &eg;
        let sym = (&vtg + vtg.transpose()) * 0.5;
        let rg = &eg - &v * sym;
        let gnorm2 = rg.norm_squared();
        if gnorm2.sqrt() <= cfg.tol * (1.0 + f * f) {
            break;
        }
        let phi = 0.5 * f * f;
        let mut t = step;
        let mut accepted = false;
        while t > 1e-18 {
            let cand = orthonormalize(&v + &rg * t);
            let (fc, gc) = value_and_gradient(a, &cand);
            if 0.5 * fc * fc >= phi + 1e-4 * t * gnorm2 {
                v = cand;
                f = fc;
                g = gc;
                step = (t * 2.0).min(1e6);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f.abs(), v, iters)
}

/// Frame spanned by the coordinate axes of the largest coefficient; its
/// value is `max_I |a_I|`, the lower end of the comass sandwich.
fn coordinate_frame(a: &Covector) -> DMatrix<f64> {
    let (idx, _) = a
        .terms()
        .fold(None::<(super::MultiIndex, f64)>, |best, (i, v)| match best {
            Some((_, b)) if b >= v.abs() => best,
            _ => Some((i, v.abs())),
        })
        .expect("nonzero covector");
    let mut v = DMatrix::zeros(a.dim(), a.degree());
    for (c, i) in idx.indices().enumerate() {
        v[(i - 1, c)] = 1.0;
    }
    v
}

/// Comass by multi-start Riemannian ascent over orthonormal frames.
///
/// Restart 0 starts at the coordinate frame of the largest coefficient; the
/// remaining `cfg.restarts - 1` start at random frames. The zero covector
/// returns 0 without optimization, and degree 0 returns `|a|`.
pub fn comass(a: &Covector, cfg: &OptimizerConfig) -> ComassResult {
    let (m, k) = (a.dim(), a.degree());
    if a.is_zero() || k == 0 {
        return ComassResult {
            value: a.max_abs_coefficient(),
            frame: Vec::new(),
            restarts: 0,
            iterations: 0,
        };
    }
    let restarts = cfg.restarts.max(1);
    let runs: Vec<(f64, DMatrix<f64>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                coordinate_frame(a)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64);
                random_frame(&mut rng, m, k)
            };
            ascend(a, start, cfg)
        })
        .collect();
    let iterations = runs.iter().map(|r| r.2).sum();
    // first maximal restart wins, independent of scheduling
    let best = runs
        .into_iter()
        .reduce(|best, cur| if cur.0 > best.0 { cur } else { best })
        .expect("at least one restart");
    ComassResult { value: best.0, frame: frame_columns(&best.1), restarts, iterations }
}

/// Maximum of `|a(frame)|` over `samples` Haar-random orthonormal frames.
pub fn comass_oracle(a: &Covector, samples: usize, seed: u64) -> f64 {
    let (m, k) = (a.dim(), a.degree());
    if a.is_zero() || k == 0 {
        return a.max_abs_coefficient();
    }
    const CHUNKS: usize = 64;
    let per = samples.div_ceil(CHUNKS);
    (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let todo = per.min(samples.saturating_sub(c * per));
            (0..todo)
                .map(|_| a.apply_unchecked(&random_frame(&mut rng, m, k)).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Pointwise comass with closed forms where they exist: single-term
/// covectors, top degree, and degrees 1 and m−1 (all decomposable, so the
/// comass is the Euclidean norm). Other covectors go to [`comass`].
pub fn pointwise_comass(a: &Covector, cfg: &OptimizerConfig) -> f64 {
    let (m, k) = (a.dim(), a.degree());
    if a.is_zero() {
        return 0.0;
    }
    if a.len() == 1 || k == 0 || k == m {
        return a.max_abs_coefficient();
    }
    if k == 1 || k + 1 == m {
        return a.norm();
    }
    comass(a, cfg).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let a = Covector::parse("1 dx1^dx2 + 0.5 dx2^dx3 - 2 dx1^dx4", 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_frame(&mut rng, 4, 2);
        let (_, g) = value_and_gradient(&a, &v);
        let h = 1e-6;
        for i in 0..4 {
            for j in 0..2 {
                let mut p = v.clone();
                let mut q = v.clone();
                p[(i, j)] += h;
                q[(i, j)] -= h;
                let fd = (a.apply_unchecked(&p) - a.apply_unchecked(&q)) / (2.0 * h);
                assert!((fd - g[(i, j)]).abs() < 1e-8, "({i},{j}): {fd} vs {}", g[(i, j)]);
            }
        }
    }

    #[test]
    fn zero_and_scalar_shortcuts() {
        let cfg = OptimizerConfig::default();
        assert_eq!(comass(&Covector::zero(3, 2), &cfg).value, 0.0);
        assert_eq!(comass(&Covector::scalar(3, -2.5), &cfg).value, 2.5);
        assert_eq!(comass_oracle(&Covector::zero(3, 2), 10, 0), 0.0);
    }

    #[test]
    fn frames_are_orthonormal() {
        let a = Covector::parse("dx1^dx2 + dx3^dx4", 4).unwrap();
        let res = comass(&a, &OptimizerConfig { restarts: 8, ..Default::default() });
        let v = DMatrix::from_fn(4, 2, |i, j| res.frame[j][i]);
        let gram = v.transpose() * &v;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
        assert!((a.apply(&v).unwrap().abs() - res.value).abs() < 1e-15);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = Covector::parse("dx1^dx2^dx3 + 0.3 dx2^dx4^dx5 - dx1^dx3^dx5", 5).unwrap();
        let cfg = OptimizerConfig { restarts: 16, ..Default::default() };
        assert_eq!(comass(&a, &cfg), comass(&a, &cfg));
        assert_eq!(comass_oracle(&a, 1000, 9), comass_oracle(&a, 1000, 9));
    }
}
