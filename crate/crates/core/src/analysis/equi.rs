use serde::{Deserialize, Serialize};

use super::{check_top_degree, density};
use crate::curves::CurveMap;
use crate::error::{Error, Result};
use crate::manifold::{FormField, DEFAULT_FD_STEP};
use crate::quadrature::{log_measure, sphere_integral, try_ball_integral, IntegralEstimate, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiRow {
    pub r: f64,
    /// `A_{ω₀}(r)`
    pub a0: IntegralEstimate,
    /// `A_ω(r)` with `ω = ω₀ − dτ`
    pub a: IntegralEstimate,
    /// `∫_{S(r)} f*τ`
    pub sphere: IntegralEstimate,
    /// `|sphere − (A_{ω₀} − A_ω)|`
    pub stokes_residual: f64,
    pub stokes_bound: f64,
    pub ratio: Option<f64>,
    /// `A_{ω₀}(r)^δ ≤ |∫_{S(r)} f*τ|`
    pub flagged: bool,
    /// `A_{ω₀}(r)^{δ−1}`
    pub decay_bound: Option<f64>,
    pub decay_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiReport {
    pub delta: f64,
    pub rows: Vec<EquiRow>,
    /// Union of the radius-grid cells around flagged radii.
    pub exception_intervals: Vec<(f64, f64)>,
    pub log_measure: f64,
    pub stokes_ok: bool,
    /// `|ratio − 1| ≤ A_{ω₀}^{δ−1}` at every unflagged radius.
    pub decay_ok: bool,
    /// `max r·|ratio(r) − 1|` over the schedule.
    pub fitted_c: Option<f64>,
    /// `max_{r' ≥ r} |ratio(r') − 1|` per radius.
    pub envelope: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

/// Cell of radius `i`: bounded by the geometric midpoints with its
/// neighbours, the end cells mirrored, and clipped to `[1, ∞)`.
fn radius_cell(radii: &[f64], i: usize) -> (f64, f64) {
    let r = radii[i];
    let lo = if i > 0 {
        (radii[i - 1] * r).sqrt()
    } else if radii.len() > 1 {
        r / (radii[1] / r).sqrt()
    } else {
        r
    };
    let hi = if i + 1 < radii.len() {
        (radii[i + 1] * r).sqrt()
    } else if i > 0 {
        r * (r / radii[i - 1]).sqrt()
    } else {
        r
    };
    (lo.max(1.0), hi.max(1.0))
}

pub fn default_delta(n: usize) -> f64 {
    (2.0 * n as f64 - 1.0) / (2.0 * n as f64)
}

/// Ratios `A_ω(r)/A_{ω₀}(r)` for `ω = ω₀ − dτ`, the sphere term computed
/// directly and through Stokes, and the radii where the sphere term beats
/// `A_{ω₀}^δ`.
pub fn equidistribution_report(
    f: &CurveMap,
    omega0: &FormField,
    tau: &FormField,
    radii: &[f64],
    delta: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<EquiReport> {
    check_top_degree(f, omega0)?;
    let n = f.domain_dim();
    if tau.target() != f.target() || tau.degree() + 1 != n {
        return Err(Error::DegreeMismatch { expected: n - 1, found: tau.degree() });
    }
    let delta = delta.unwrap_or_else(|| default_delta(n));
    let lo = (n as f64 - 1.0) / n as f64;
    if !(delta > lo && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} outside (({n}−1)/{n}, 1)")));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r >= 1.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be increasing and at least 1".into()));
    }
    let omega = omega0.sub(&tau.exterior_derivative_field(DEFAULT_FD_STEP)?)?;
    let origin = vec![0.0; n];
    let rho0 = density(f, omega0);
    let rho = density(f, &omega);

    let mut rows = Vec::with_capacity(radii.len());
    let mut warnings = Vec::new();
    for &r in radii {
        let a0 = try_ball_integral(&rho0, &origin, r, spec, false)?;
        let a = try_ball_integral(&rho, &origin, r, spec, false)?;
        let sphere = sphere_integral(f, tau, r, spec)?;
        let stokes_residual = (sphere.value - (a0.value - a.value)).abs();
        let stokes_bound = sphere.error_bound + a0.error_bound + a.error_bound;
        let (ratio, flagged, decay_bound, decay_ok) = if a0.value > 0.0 {
            let ratio = a.value / a0.value;
            let flagged = a0.value.powf(delta) <= sphere.value.abs();
            let bound = a0.value.powf(delta - 1.0);
            let ok = (!flagged).then(|| (ratio - 1.0).abs() <= bound + a.error_bound / a0.value);
            (Some(ratio), flagged, Some(bound), ok)
        } else {
            warnings.push(format!("r = {r} excluded: A_ω0(r) = {:.3e} is not positive", a0.value));
            (None, false, None, None)
        };
        rows.push(EquiRow { r, a0, a, sphere, stokes_residual, stokes_bound, ratio, flagged, decay_bound, decay_ok });
    }

    let exception_intervals: Vec<(f64, f64)> =
        rows.iter().enumerate().filter(|(_, row)| row.flagged).map(|(i, _)| radius_cell(radii, i)).collect();
    let log_measure = log_measure(&exception_intervals)?;
    let stokes_ok = rows.iter().all(|row| row.stokes_residual <= row.stokes_bound);
    let decay_ok = rows.iter().all(|row| row.decay_ok.unwrap_or(true));
    let fitted_c = rows
        .iter()
        .filter_map(|row| row.ratio.map(|q| row.r * (q - 1.0).abs()))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let mut envelope = vec![None; rows.len()];
    let mut running: Option<f64> = None;
    for (i, row) in rows.iter().enumerate().rev() {
        if let Some(q) = row.ratio {
            running = Some(running.map_or((q - 1.0).abs(), |m| m.max((q - 1.0).abs())));
        }
        envelope[i] = running;
    }
    Ok(EquiReport {
        delta,
        rows,
        exception_intervals,
        log_measure,
        stokes_ok,
        decay_ok,
        fitted_c,
        envelope,
        warnings,
    })
}
