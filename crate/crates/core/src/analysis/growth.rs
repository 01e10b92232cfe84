use serde::{Deserialize, Serialize};

use super::{check_top_degree, density};
use crate::curves::CurveMap;
use crate::error::{Error, Result};
use crate::manifold::FormField;
use crate::quadrature::{try_ball_integral, unit_ball_volume, IntegralEstimate, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub r: f64,
    pub a: IntegralEstimate,
    /// `A(r) / r^ε`
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub epsilon: f64,
    pub rows: Vec<GrowthRow>,
    /// Minimum of `A(r)/r^ε` over the second half of the schedule.
    pub tail_min: f64,
    /// Least-squares slope of `log A` against `log r` over the same tail;
    /// absent with fewer than two tail radii or a nonpositive `A` there.
    pub slope: Option<f64>,
    /// `A` nondecreasing within the quadrature error bounds.
    pub monotone: bool,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("empty radius schedule".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
    }
    Ok(())
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `A(r) = ∫_{B(r)} ⋆f*ω` along the schedule.
pub fn growth_function(
    f: &CurveMap,
    omega: &FormField,
    radii: &[f64],
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<GrowthReport> {
    check_top_degree(f, omega)?;
    check_radii(radii)?;
    let origin = vec![0.0; f.domain_dim()];
    let rho = density(f, omega);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let a = try_ball_integral(&rho, &origin, r, spec, false)?;
        rows.push(GrowthRow { r, a, normalized: a.value / r.powf(epsilon) });
    }
    let tail = &rows[rows.len() / 2..];
    let tail_min = tail.iter().map(|row| row.normalized).fold(f64::INFINITY, f64::min);
    let slope = if tail.iter().all(|row| row.a.value > 0.0) {
        let xs: Vec<f64> = tail.iter().map(|row| row.r.ln()).collect();
        let ys: Vec<f64> = tail.iter().map(|row| row.a.value.ln()).collect();
        least_squares_slope(&xs, &ys)
    } else {
        None
    };
    let monotone = rows
        .windows(2)
        .all(|w| w[1].a.value >= w[0].a.value - (w[0].a.error_bound + w[1].a.error_bound));
    Ok(GrowthReport { epsilon, rows, tail_min, slope, monotone })
}

/// `ε = n(1 − 1/p)` and `C = C_p⁻¹ |Bⁿ(1)|^{1−1/p} 2^{n/p}`.
pub fn epsilon_and_constant(n: usize, p: f64, c_p: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must exceed 1")));
    }
    if !(c_p > 0.0 && c_p.is_finite()) {
        return Err(Error::InvalidArgument(format!("constant C_p = {c_p} must be positive")));
    }
    let nf = n as f64;
    let eps = nf * (1.0 - 1.0 / p);
    let c = unit_ball_volume(n).powf(1.0 - 1.0 / p) * 2f64.powf(nf / p) / c_p;
    Ok((eps, c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastGrowthVerdict {
    pub p: f64,
    pub c_p: f64,
    pub r0: f64,
    pub epsilon: f64,
    pub constant: f64,
    /// `∫_{B(r0/2)} |⋆f*ω|^p`
    pub p_integral: IntegralEstimate,
    /// `C (∫_{B(r0/2)} |⋆f*ω|^p)^{1/p}`
    pub lower_bound: f64,
    /// `(r, A(r)/r^ε − lower_bound)` for scheduled `r ≥ r0`.
    pub margins: Vec<(f64, f64)>,
    pub worst_margin: f64,
    pub pass: bool,
    pub reason: Option<String>,
}

/// Checks `A(r)/r^ε ≥ C (∫_{B(r0/2)} |⋆f*ω|^p)^{1/p}` at every scheduled
/// `r ≥ r0`, with `ε` and `C` from [`epsilon_and_constant`]. Each comparison
/// is allowed the quadrature error bounds plus `spec.tol` relative slack.
pub fn fast_growth_check(
    f: &CurveMap,
    omega: &FormField,
    report: &GrowthReport,
    c_p: f64,
    p: f64,
    r0: f64,
    spec: &QuadratureSpec,
) -> Result<FastGrowthVerdict> {
    check_top_degree(f, omega)?;
    let n = f.domain_dim();
    let (epsilon, constant) = epsilon_and_constant(n, p, c_p)?;
    if !(r0 > 0.0) {
        return Err(Error::InvalidArgument(format!("r0 = {r0} must be positive")));
    }
    let rows: Vec<&GrowthRow> = report.rows.iter().filter(|row| row.r >= r0).collect();
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!("growth report has no radius ≥ r0 = {r0}")));
    }
    let rho = density(f, omega);
    let p_integral = try_ball_integral(|x| Ok(rho(x)?.abs().powf(p)), &vec![0.0; n], r0 / 2.0, spec, false)?;
    let base = p_integral.value.max(0.0);
    let lower_bound = constant * base.powf(1.0 / p);
    // first-order propagation of the p-integral's error through x ↦ x^{1/p}
    let lower_err = if base > 0.0 { constant * base.powf(1.0 / p - 1.0) * p_integral.error_bound / p } else { 0.0 };

    let mut margins = Vec::with_capacity(rows.len());
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    for row in rows {
        let lhs = row.a.value / row.r.powf(epsilon);
        let slack = row.a.error_bound / row.r.powf(epsilon) + lower_err + spec.tol * lower_bound.abs();
        let margin = lhs - lower_bound;
        worst_margin = worst_margin.min(margin);
        pass &= margin + slack >= 0.0;
        margins.push((row.r, margin));
    }
    let mut reason = None;
    if p_integral.value <= p_integral.error_bound {
        pass = false;
        reason = Some(format!("∫_B(r0/2) |density|^p = {:.3e} is not positive", p_integral.value));
    } else if !pass {
        reason = Some(format!("A(r)/r^ε falls below the lower bound by {:.3e}", -worst_margin));
    }
    Ok(FastGrowthVerdict {
        p,
        c_p,
        r0,
        epsilon,
        constant,
        p_integral,
        lower_bound,
        margins,
        worst_margin,
        pass,
        reason,
    })
}
