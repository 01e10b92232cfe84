//! Node sets: Gauss–Legendre, product rules on the unit sphere, pairwise
//! summation.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `|Bⁿ(1)|` via `V_n = 2π/n · V_{n−2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `|S^{n−1}(1)| = n·|Bⁿ(1)|`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Nodes `(cos φ, sin φ, w)` for `∫_0^π g(φ) sinᵏφ dφ`, exact when `g` is a
/// polynomial in `cos φ` of low degree. `k = 1` is Gauss–Legendre in
/// `t = cos φ`; `k = 2` is Gauss–Chebyshev of the second kind.
fn polar_rule(k: usize, count: usize) -> Vec<(f64, f64, f64)> {
    match k {
        1 => gauss_legendre(count, -1.0, 1.0)
            .into_iter()
            .map(|(t, w)| (t, (1.0 - t * t).sqrt(), w))
            .collect(),
        2 => (1..=count)
            .map(|i| {
                let phi = i as f64 * PI / (count + 1) as f64;
                let s = phi.sin();
                (phi.cos(), s, PI / (count + 1) as f64 * s * s)
            })
            .collect(),
        _ => unreachable!("tensor-polar rules stop at n = 4"),
    }
}

/// Product rule on `S^{n−1}` (`2 ≤ n ≤ 4`) with about `budget` nodes:
/// uniform in the azimuth, polar angles from [`polar_rule`]. Weights sum to
/// the sphere area.
pub fn sphere_rule(n: usize, budget: usize) -> Vec<(Vec<f64>, f64)> {
    assert!((2..=4).contains(&n), "sphere_rule supports 2 ≤ n ≤ 4");
    let budget = budget.max(1);
    let polar_count = match n {
        2 => 1,
        _ => ((budget as f64 / 2.0).powf(1.0 / (n - 1) as f64).round() as usize).max(1),
    };
    let azimuth = (budget / polar_count.pow((n - 2) as u32)).max(1);
    let az: Vec<(f64, f64)> = (0..azimuth)
        .map(|j| (2.0 * PI * (j as f64 + 0.5) / azimuth as f64, 2.0 * PI / azimuth as f64))
        .collect();

    // (product of sines so far, leading coordinates, weight)
    let mut partial: Vec<(f64, Vec<f64>, f64)> = vec![(1.0, Vec::new(), 1.0)];
    for level in 0..n - 2 {
        let polar = polar_rule(n - 2 - level, polar_count);
        let mut next = Vec::with_capacity(partial.len() * polar.len());
        for (s, coords, w) in &partial {
            for &(c, sn, wp) in &polar {
                let mut cs = coords.clone();
                cs.push(s * c);
                next.push((s * sn, cs, w * wp));
            }
        }
        partial = next;
    }
    let mut out = Vec::with_capacity(partial.len() * az.len());
    for (s, coords, w) in &partial {
        for &(theta, wt) in &az {
            let mut c = coords.clone();
            c.push(s * theta.cos());
            c.push(s * theta.sin());
            out.push((c, w * wt));
        }
    }
    out
}

/// Pairwise summation; the grouping depends only on the length.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
