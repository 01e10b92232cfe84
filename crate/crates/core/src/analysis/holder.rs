use serde::{Deserialize, Serialize};

use super::{check_top_degree, density, Ball, BallFamily};
use crate::curves::{distortion_sup, operator_norm, CurveMap};
use crate::error::{Error, Result};
use crate::exterior::OptimizerConfig;
use crate::manifold::{inf_comass, FormField, SampleRegion};
use crate::quadrature::{try_ball_integral, IntegralEstimate, QuadratureSpec};
use crate::sampling::{uniform_box_points, SampleSpec};

/// Negative mass below this fraction of the total mass is roundoff.
const NEGATIVE_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub ball: Ball,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    /// Exponent on the half ball (reverse Hölder) or on the full ball
    /// (the `n/(n+1)` variant).
    pub exponent: f64,
    pub family: String,
    pub balls: Vec<BallRecord>,
    /// Largest recorded `lhs/rhs`.
    pub c_hat: Option<f64>,
    pub worst: Option<usize>,
    pub warnings: Vec<String>,
}

struct Moments {
    positive_avg: f64,
    negative_avg: f64,
}

/// Averages of `ρ⁺` and `ρ⁻` over a ball, and the average of `(ρ⁺)^p`
/// when requested.
fn signed_average<G>(rho: &G, ball: &Ball, power: f64, spec: &QuadratureSpec) -> Result<(Moments, f64)>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    let plus = try_ball_integral(|x| Ok(rho(x)?.max(0.0)), &ball.center, ball.radius, spec, true)?;
    let minus = try_ball_integral(|x| Ok((-rho(x)?).max(0.0)), &ball.center, ball.radius, spec, true)?;
    let pow = if power == 1.0 {
        plus.value
    } else {
        try_ball_integral(|x| Ok(rho(x)?.max(0.0).powf(power)), &ball.center, ball.radius, spec, true)?.value
    };
    Ok((Moments { positive_avg: plus.value, negative_avg: minus.value }, pow))
}

fn finish(exponent: f64, family: &BallFamily, balls: Vec<BallRecord>, warnings: Vec<String>) -> HolderReport {
    let mut worst: Option<(usize, f64)> = None;
    for (i, b) in balls.iter().enumerate() {
        if let Some(q) = b.ratio {
            if worst.is_none_or(|(_, w)| q > w) {
                worst = Some((i, q));
            }
        }
    }
    HolderReport {
        exponent,
        family: family.describe(),
        balls,
        c_hat: worst.map(|(_, q)| q),
        worst: worst.map(|(i, _)| i),
        warnings,
    }
}

fn negative_flag(m: &Moments) -> Option<String> {
    (m.negative_avg > NEGATIVE_MASS_TOL * (m.positive_avg + m.negative_avg))
        .then(|| format!("density negative on the ball (average negative part {:.3e})", m.negative_avg))
}

/// Per ball `B`: `(avg_{½B} ρ^p)^{1/p} / avg_B ρ`; `c_hat` is the largest.
pub fn reverse_holder_estimate(
    f: &CurveMap,
    omega: &FormField,
    family: &BallFamily,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<HolderReport> {
    check_top_degree(f, omega)?;
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must exceed 1")));
    }
    let rho = density(f, omega);
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (i, ball) in family.balls()?.into_iter().enumerate() {
        let (outer, _) = signed_average(&rho, &ball, 1.0, spec)?;
        let (inner, inner_p) = signed_average(&rho, &ball.half(), p, spec)?;
        let lhs = inner_p.powf(1.0 / p);
        let rhs = outer.positive_avg - outer.negative_avg;
        let mut flag = negative_flag(&outer).or_else(|| negative_flag(&inner));
        if flag.is_none() && rhs <= 0.0 {
            flag = Some(format!("average density {rhs:.3e} on B is not positive"));
        }
        if let Some(msg) = &flag {
            warnings.push(format!("ball {i} excluded: {msg}"));
        }
        let ratio = flag.is_none().then(|| lhs / rhs);
        records.push(BallRecord { ball, lhs, rhs, ratio, flag });
    }
    Ok(finish(p, family, records, warnings))
}

/// Per ball `B`: `avg_{½B} ρ / (avg_B ρ^{n/(n+1)})^{(n+1)/n}`.
pub fn prop4_check(f: &CurveMap, omega: &FormField, family: &BallFamily, spec: &QuadratureSpec) -> Result<HolderReport> {
    check_top_degree(f, omega)?;
    let n = f.domain_dim() as f64;
    let s = n / (n + 1.0);
    let rho = density(f, omega);
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (i, ball) in family.balls()?.into_iter().enumerate() {
        let (outer, outer_s) = signed_average(&rho, &ball, s, spec)?;
        let (inner, _) = signed_average(&rho, &ball.half(), 1.0, spec)?;
        let lhs = inner.positive_avg - inner.negative_avg;
        let rhs = outer_s.powf(1.0 / s);
        let mut flag = negative_flag(&outer).or_else(|| negative_flag(&inner));
        if flag.is_none() && rhs <= 0.0 {
            flag = Some("density vanishes on B".to_string());
        }
        if let Some(msg) = &flag {
            warnings.push(format!("ball {i} excluded: {msg}"));
        }
        let ratio = flag.is_none().then(|| lhs / rhs);
        records.push(BallRecord { ball, lhs, rhs, ratio, flag });
    }
    Ok(finish(s, family, records, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HigherIntegrabilityReport {
    pub ball: Ball,
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub k_sampled: bool,
    pub inf_comass: f64,
    /// `∫_U ‖Df‖^q`
    pub lhs: IntegralEstimate,
    /// `∫_U |⋆f*ω|^p`
    pub density_integral: IntegralEstimate,
    /// `(inf ‖ω‖)^{−p} K^p ∫_U |⋆f*ω|^p`
    pub rhs: f64,
    pub rhs_error: f64,
    pub pass: bool,
}

/// Points drawn uniformly from a ball by rejection from its bounding box.
fn ball_samples(ball: &Ball, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = ball.center.len();
    let mut out = Vec::with_capacity(count);
    let mut round = 0u64;
    while out.len() < count {
        for u in uniform_box_points(n, -1.0, 1.0, 4 * count, seed.wrapping_add(round)) {
            if u.iter().map(|c| c * c).sum::<f64>() <= 1.0 && out.len() < count {
                out.push(ball.center.iter().zip(&u).map(|(c, ui)| c + ball.radius * ui).collect());
            }
        }
        round += 1;
    }
    out
}

const HI_SAMPLES: usize = 512;

/// Checks `∫_U ‖Df‖^{np} ≤ (inf ‖ω‖)^{−p} K^p ∫_U |⋆f*ω|^p`. `K` is sampled
/// over `U` with [`distortion_sup`] when not supplied; the infimum of the
/// comass is taken over the fundamental domain on tori and over sampled
/// image points otherwise.
pub fn higher_integrability_check(
    f: &CurveMap,
    omega: &FormField,
    ball: &Ball,
    p: f64,
    k: Option<f64>,
    spec: &QuadratureSpec,
    cfg: &OptimizerConfig,
) -> Result<HigherIntegrabilityReport> {
    check_top_degree(f, omega)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be at least 1")));
    }
    let n = f.domain_dim();
    if ball.center.len() != n {
        return Err(Error::DimensionMismatch(format!("ball in ℝ^{} for n = {n}", ball.center.len())));
    }
    let q = n as f64 * p;
    let samples = ball_samples(ball, HI_SAMPLES, cfg.seed);
    let (k, k_sampled) = match k {
        Some(k) => (k, false),
        None => {
            let rep = distortion_sup(f, omega, &SampleSpec::Points { points: samples.clone() }, cfg)?;
            let k = rep
                .k_hat
                .ok_or_else(|| Error::InvalidArgument("every sampled density is degenerate".into()))?;
            (k, true)
        }
    };
    let region = if f.target().is_torus() {
        SampleRegion::FundamentalDomain
    } else {
        SampleRegion::Points(samples.iter().map(|x| f.eval(x)).collect::<Result<_>>()?)
    };
    let inf = inf_comass(omega, HI_SAMPLES, &region, cfg)?;
    if !(inf > 0.0) {
        return Err(Error::InvalidArgument(format!("infimum of the comass is {inf}, not positive")));
    }
    let lhs = try_ball_integral(|x| Ok(operator_norm(&f.differential(x)?).powf(q)), &ball.center, ball.radius, spec, false)?;
    let rho = density(f, omega);
    let density_integral = try_ball_integral(|x| Ok(rho(x)?.abs().powf(p)), &ball.center, ball.radius, spec, false)?;
    let factor = inf.powf(-p) * k.powf(p);
    let rhs = factor * density_integral.value;
    let rhs_error = factor * density_integral.error_bound;
    let pass = lhs.value <= rhs + lhs.error_bound + rhs_error + spec.tol * rhs.abs();
    Ok(HigherIntegrabilityReport {
        ball: ball.clone(),
        p,
        q,
        k,
        k_sampled,
        inf_comass: inf,
        lhs,
        density_integral,
        rhs,
        rhs_error,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Covector;
    use crate::manifold::{Coefficient, FormTerm, TargetManifold};
    use crate::{MultiIndex, TorusLinearCurve};
    use std::f64::consts::PI;

    fn random_family() -> BallFamily {
        BallFamily::Random { dim: 2, count: 20, center_lo: -10.0, center_hi: 10.0, r_min: 0.5, r_max: 4.0, seed: 3 }
    }

    #[test]
    fn constant_density_gives_unit_constants() {
        let f = TorusLinearCurve::from_floats(&[1.0, 1.0]).unwrap();
        let spec = QuadratureSpec::default();
        let rh = reverse_holder_estimate(f.curve_ref(), &f.standard_form(), &random_family(), 2.0, &spec).unwrap();
        assert!((rh.c_hat.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(rh.balls.len(), 20);
        let p4 = prop4_check(f.curve_ref(), &f.standard_form(), &random_family(), &spec).unwrap();
        assert!((p4.c_hat.unwrap() - 1.0).abs() < 1e-10);

        let e2 = TargetManifold::Euclidean(2);
        let three = FormField::constant(e2, &Covector::volume(2).scaled(3.0)).unwrap();
        let p4 = prop4_check(&CurveMap::identity(2).unwrap(), &three, &random_family(), &spec).unwrap();
        assert!((p4.c_hat.unwrap() - 1.0).abs() < 1e-10);
    }

    fn bump_form(s: f64, floor: f64) -> FormField {
        let coeff = Coefficient::custom("bump", move |x: &[f64]| floor + (-(x[0] * x[0] + x[1] * x[1]) / (s * s)).exp());
        let term = FormTerm { coefficient: coeff, basis: MultiIndex::new(&[1, 2]).unwrap() };
        FormField::new(TargetManifold::Euclidean(2), 2, vec![term], false, None).unwrap()
    }

    #[test]
    fn concentrated_bump_exceeds_one() {
        let (s, floor) = (0.3, 1e-3);
        let omega = bump_form(s, floor);
        let family = BallFamily::Concentric { dim: 2, radii: vec![2.0] };
        let spec = QuadratureSpec::tensor(128, 256);
        let rep = reverse_holder_estimate(&CurveMap::identity(2).unwrap(), &omega, &family, 2.0, &spec).unwrap();
        // closed forms in polar coordinates
        let r = 2.0f64;
        let avg_b = floor + s * s * (1.0 - (-r * r / (s * s)).exp()) / (r * r);
        let h = r / 2.0;
        // ∫_{B(h)} (floor + g)² with g = e^{−|x|²/s²}
        let int_g = PI * s * s * (1.0 - (-h * h / (s * s)).exp());
        let int_g2 = PI * s * s / 2.0 * (1.0 - (-2.0 * h * h / (s * s)).exp());
        let int_sq = PI * h * h * floor * floor + 2.0 * floor * int_g + int_g2;
        let lhs = (int_sq / (PI * h * h)).sqrt();
        assert!((rep.balls[0].rhs / avg_b - 1.0).abs() < 1e-8);
        assert!((rep.balls[0].lhs / lhs - 1.0).abs() < 1e-8, "{} vs {}", rep.balls[0].lhs, lhs);
        assert!(rep.c_hat.unwrap() > 1.0);
    }

    #[test]
    fn negative_density_is_flagged() {
        let e2 = TargetManifold::Euclidean(2);
        let lin = FormField::parse(e2, 2, "lin@1 dx1^dx2", false, None).unwrap();
        let family = BallFamily::Explicit { balls: vec![Ball::centered(2, 1.0), Ball { center: vec![5.0, 0.0], radius: 1.0 }] };
        let rep = reverse_holder_estimate(&CurveMap::identity(2).unwrap(), &lin, &family, 2.0, &QuadratureSpec::default()).unwrap();
        assert!(rep.balls[0].flag.is_some() && rep.balls[0].ratio.is_none());
        assert!(rep.balls[1].ratio.is_some());
        assert_eq!(rep.worst, Some(1));
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn prop4_on_oscillating_density() {
        let e2 = TargetManifold::Euclidean(2);
        let omega = FormField::parse(e2, 2, "2 dx1^dx2 + sin@1 dx1^dx2", false, None).unwrap();
        let rep = prop4_check(&CurveMap::identity(2).unwrap(), &omega, &random_family(), &QuadratureSpec::default()).unwrap();
        let c = rep.c_hat.unwrap();
        assert!(c.is_finite() && c >= 1.0, "{c}");
    }

    #[test]
    fn higher_integrability_examples() {
        let spec = QuadratureSpec::default();
        let cfg = OptimizerConfig::default();
        let f = TorusLinearCurve::from_floats(&[1.0, 1.0]).unwrap();
        let u = Ball::centered(2, 1.0);
        let rep = higher_integrability_check(f.curve_ref(), &f.standard_form(), &u, 2.0, Some(3.0), &spec, &cfg).unwrap();
        assert!((rep.lhs.value - 9.0 * PI).abs() < 1e-9);
        assert!((rep.rhs - 9.0 * PI).abs() < 1e-9);
        assert!(rep.pass);
        let sampled = higher_integrability_check(f.curve_ref(), &f.standard_form(), &u, 2.0, None, &spec, &cfg).unwrap();
        assert!((sampled.k - 3.0).abs() < 1e-12 && sampled.pass);

        let e2 = TargetManifold::Euclidean(2);
        let vol = FormField::constant(e2, &Covector::volume(2)).unwrap();
        let rep = higher_integrability_check(&CurveMap::identity(2).unwrap(), &vol, &u, 2.0, Some(1.0), &spec, &cfg).unwrap();
        assert!((rep.lhs.value - PI).abs() < 1e-10 && (rep.rhs - PI).abs() < 1e-10 && rep.pass);
        let rep = higher_integrability_check(&CurveMap::scaling(2, 2.0).unwrap(), &vol, &u, 2.0, Some(1.0), &spec, &cfg).unwrap();
        assert!((rep.lhs.value - 16.0 * PI).abs() < 1e-9 && (rep.rhs - 16.0 * PI).abs() < 1e-9 && rep.pass);
    }
}
