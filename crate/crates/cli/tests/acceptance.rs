//! Acceptance suite: one line per criterion, each at its stated tolerance.
//! Run with `cargo test -p qrlab-cli --test acceptance -- --nocapture`.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use qrlab::analysis::{
    epsilon_and_constant, equidistribution_report, fast_growth_check, growth_function, higher_integrability_check,
    prop4_check, reverse_holder_estimate, Ball, BallFamily,
};
use qrlab::curves::{density_probe, distortion_quotient, rational_obstruction, star_pullback, DistortionValue, GridSpec};
use qrlab::exterior::{comass, comass_oracle, MultiIndex};
use qrlab::quadrature::unit_ball_volume;
use qrlab::sampling::uniform_box_points;
use qrlab::{Covector, FormField, OptimizerConfig, QuadratureSpec, Scalar, TargetManifold, TorusLinearCurve};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn sc(s: &str) -> Scalar {
    s.parse().unwrap()
}

fn f_y(y: &[&str]) -> TorusLinearCurve {
    TorusLinearCurve::new(y.iter().map(|s| sc(s)).collect()).unwrap()
}

fn gap(a: &Covector, b: &Covector) -> f64 {
    (a - b).max_abs_coefficient()
}

fn basis(m: usize) -> Vec<Covector> {
    (0..1u32 << m).map(|mask| Covector::basis(m, &MultiIndex::from_mask(mask).to_vec()).unwrap()).collect()
}

fn exterior_suite() -> Verdict {
    let tol = 1e-12;
    let mut worst: f64 = 0.0;
    let mut checks = 0usize;
    for m in 1..=5 {
        let b = basis(m);
        let vol = Covector::volume(m);
        for x in &b {
            let k = x.degree();
            let sign = if (k * (m - k)) % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max(gap(&x.hodge_star().hodge_star(), &x.scaled(sign)));
            checks += 1;
            for y in &b {
                let l = y.degree();
                let xy = x.wedge(y).unwrap();
                let graded = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max(gap(&xy, &y.wedge(x).unwrap().scaled(graded)));
                if k == l {
                    let lhs = x.wedge(&y.hodge_star()).unwrap();
                    worst = worst.max(gap(&lhs, &vol.scaled(x.inner(y).unwrap())));
                }
                for z in &b {
                    let left = xy.wedge(z).unwrap();
                    let right = x.wedge(&y.wedge(z).unwrap()).unwrap();
                    worst = worst.max(gap(&left, &right));
                }
                checks += 2;
            }
        }
    }
    verdict(worst <= tol, format!("{checks} basis identities for m ≤ 5, worst residual {worst:.1e} (tol {tol:.0e})"))
}

fn comass_suite() -> Verdict {
    let cfg = OptimizerConfig { restarts: 64, ..Default::default() };
    let mut parts = Vec::new();
    let mut pass = true;
    for (label, expr) in [("dx12", "dx1^dx2"), ("dx12+dx34", "1.0 dx1^dx2 + 1.0 dx3^dx4")] {
        let a = Covector::parse(expr, 4).unwrap();
        let start = Instant::now();
        let value = comass(&a, &cfg).value;
        let elapsed = start.elapsed();
        let oracle = comass_oracle(&a, 100_000, 5);
        let ok = (value - 1.0).abs() <= 1e-3 && value >= oracle && elapsed < Duration::from_secs(10);
        pass &= ok;
        parts.push(format!("{label}: {value:.6} ≥ oracle {oracle:.6} in {:.2}s", elapsed.as_secs_f64()));
    }
    verdict(pass, parts.join("; "))
}

fn distortion_suite() -> Verdict {
    let t = f_y(&["1", "1"]);
    let omega = t.standard_form();
    let cfg = OptimizerConfig::default();
    let mut worst: f64 = 0.0;
    let mut k_max: f64 = 0.0;
    let mut ok = true;
    for x in uniform_box_points(2, -100.0, 100.0, 1000, 31) {
        match distortion_quotient(t.curve_ref(), &omega, &x, &cfg).unwrap() {
            DistortionValue::Quotient(q) => {
                worst = worst.max((q - 3.0).abs());
                k_max = k_max.max(q);
            }
            _ => ok = false,
        }
    }
    let bound = (1.0 + 2f64.sqrt()).powi(2);
    let pass = ok && worst <= 1e-9 && k_max <= bound && (t.distortion_bound() - bound).abs() < 1e-12 && bound < 5.82843;
    verdict(pass, format!("max |K − 3| = {worst:.1e} over 1000 points, max K = {k_max:.12} ≤ {bound:.5}"))
}

fn pullback_suite() -> Verdict {
    let t = f_y(&["1", "1"]);
    let omega = t.standard_form();
    let worst = uniform_box_points(2, -100.0, 100.0, 1000, 41)
        .iter()
        .map(|x| (star_pullback(t.curve_ref(), &omega, x).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(worst <= 1e-12, format!("max |⋆f*ω − 1| = {worst:.1e} over 1000 points"))
}

fn holder_family() -> BallFamily {
    BallFamily::Random { dim: 2, count: 20, center_lo: -20.0, center_hi: 20.0, r_min: 0.25, r_max: 8.0, seed: 2024 }
}

fn holder_spec() -> QuadratureSpec {
    QuadratureSpec::tensor(32, 128)
}

/// `C_hat` on the constant-density family, shared with the growth check.
fn rh_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let t = f_y(&["1", "1"]);
        let r = reverse_holder_estimate(t.curve_ref(), &t.standard_form(), &holder_family(), 2.0, &holder_spec()).unwrap();
        r.c_hat.expect("c_hat on a positive density")
    })
}

fn growth_suite() -> Verdict {
    let t = f_y(&["1", "1"]);
    let omega = t.standard_form();
    let spec = QuadratureSpec::tensor(64, 256);
    let radii = [1.0, 2.0, 4.0, 8.0];
    let report = growth_function(t.curve_ref(), &omega, &radii, 2.0, &spec).unwrap();
    let rel = report.rows.iter().map(|row| (row.a.value / (PI * row.r * row.r) - 1.0).abs()).fold(0.0, f64::max);
    // slope over the whole schedule
    let xs: Vec<f64> = report.rows.iter().map(|r| r.r.ln()).collect();
    let ys: Vec<f64> = report.rows.iter().map(|r| r.a.value.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let c_p = rh_constant();
    let fast = fast_growth_check(t.curve_ref(), &omega, &report, c_p, 2.0, 1.0, &spec).unwrap();
    let pass = rel <= 1e-3 && (slope - 2.0).abs() <= 0.05 && fast.pass;
    verdict(
        pass,
        format!(
            "max |A/πr² − 1| = {rel:.1e}, slope {slope:.6}, fast growth {} with C_p = {c_p:.6} (worst margin {:.2e})",
            fast.pass, fast.worst_margin
        ),
    )
}

fn holder_suite() -> Verdict {
    let t = f_y(&["1", "1"]);
    let c = rh_constant();
    let p4 = prop4_check(t.curve_ref(), &t.standard_form(), &holder_family(), &holder_spec()).unwrap();
    let c4 = p4.c_hat.unwrap_or(f64::NAN);
    let pass = (c - 1.0).abs() <= 1e-3 && (c4 - 1.0).abs() <= 1e-3;
    verdict(pass, format!("C_hat = {c:.9}, C_hat4 = {c4:.9} over {} random balls", p4.balls.len()))
}

fn constant_suite() -> Verdict {
    let (eps, c) = epsilon_and_constant(2, 2.0, 1.0).unwrap();
    let expected = 2.0 * PI.sqrt();
    let ball = unit_ball_volume(2);
    let pass = eps == 1.0 && (c - expected).abs() <= 4.0 * f64::EPSILON * expected && (ball - PI).abs() <= f64::EPSILON * PI;
    verdict(pass, format!("ε = {eps}, C = {c:.17} vs 2√π = {expected:.17}, |B²| = {ball}"))
}

fn higher_integrability_suite() -> Verdict {
    let t = f_y(&["1", "1"]);
    let spec = QuadratureSpec::tensor(64, 256);
    let r = higher_integrability_check(
        t.curve_ref(),
        &t.standard_form(),
        &Ball::centered(2, 1.0),
        2.0,
        None,
        &spec,
        &OptimizerConfig::default(),
    )
    .unwrap();
    let target = 9.0 * PI;
    let err_l = (r.lhs.value / target - 1.0).abs();
    let err_r = (r.rhs / target - 1.0).abs();
    let pass = r.pass && err_l <= 5e-3 && err_r <= 5e-3;
    verdict(pass, format!("lhs {:.9}, rhs {:.9}, 9π = {target:.9} (K = {:.9})", r.lhs.value, r.rhs, r.k))
}

fn equidistribution_suite() -> Verdict {
    let t = f_y(&["1", "1"]);
    let target = TargetManifold::FlatTorus(3);
    let tau = FormField::parse(target, 1, &format!("{} sin@3 dx1", 1.0 / (2.0 * PI)), false, None).unwrap();
    let radii = [2.0, 4.0, 8.0, 16.0, 32.0];
    let spec = QuadratureSpec::tensor(256, 1024);
    let rep = equidistribution_report(t.curve_ref(), &t.standard_form(), &tau, &radii, Some(0.75), &spec).unwrap();
    let worst = rep
        .rows
        .iter()
        .filter_map(|r| Some((r.r, (r.ratio? - 1.0).abs(), r.decay_bound?)))
        .map(|(r, d, b)| format!("r={r}: {d:.1e}≤{b:.2}"))
        .collect::<Vec<_>>();
    let pass = rep.decay_ok && rep.stokes_ok && rep.log_measure == 0.0;
    verdict(
        pass,
        format!("decay {} [{}], Stokes {}, log-measure {}", rep.decay_ok, worst.join(", "), rep.stokes_ok, rep.log_measure),
    )
}

fn density_suite() -> Verdict {
    let start = Instant::now();
    let v = vec![sc("0"), sc("0"), sc("sqrt:2")];
    let rational = f_y(&["1/2", "1/3"]);
    let o = rational_obstruction(rational.slope(), &v).unwrap();
    let grid = GridSpec::cube(2, 0.0, 50.0, 0.1).unwrap();
    let vf: Vec<f64> = v.iter().map(Scalar::value).collect();
    let rat = density_probe(&rational, &vf, &grid).unwrap();
    let irrational = f_y(&["sqrt:2", "sqrt:3"]);
    let irr = density_probe(&irrational, &vf, &grid).unwrap();
    let irr_generic = density_probe(&irrational, &[0.3, 0.7, 0.125], &grid).unwrap();
    let elapsed = start.elapsed();
    let pass = o.order == 6
        && (o.r - 0.02022).abs() <= 1e-5
        && rat.min_distance >= o.r
        && irr.min_distance < 0.05
        && irr_generic.min_distance < 0.05
        && elapsed < Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "|E| = {}, r = {:.6}; probe min {:.6} (rational), {:.2e} and {:.2e} (irrational); {:.2}s",
            o.order,
            o.r,
            rat.min_distance,
            irr.min_distance,
            irr_generic.min_distance,
            elapsed.as_secs_f64()
        ),
    )
}

fn determinism_suite() -> Verdict {
    let dir = common::scratch("determinism");
    let mut bad = Vec::new();
    for (i, (command, cfg)) in common::RUNS.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = format!("{i}-{run}.json");
            let cfg = common::config(cfg);
            let status = common::qrlab(&dir, &[command, "--config", cfg.to_str().unwrap(), "--seed", "17", "--out", &out]);
            if status.status.code() != Some(0) {
                bad.push(format!("{command} exited {:?}", status.status.code()));
            }
            outputs.push(fs::read(dir.join(&out)).unwrap_or_default());
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            bad.push(format!("{command} ({cfg}) differs"));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} runs, identical JSON bytes", common::RUNS.len())
    } else {
        bad.join("; ")
    };
    verdict(bad.is_empty(), detail)
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("exterior algebra identities", exterior_suite),
        ("comass of calibrating 2-forms", comass_suite),
        ("torus curve distortion", distortion_suite),
        ("torus curve pullback density", pullback_suite),
        ("growth and fast growth", growth_suite),
        ("reverse Hölder constants", holder_suite),
        ("fast-growth exponent and constant", constant_suite),
        ("higher integrability", higher_integrability_suite),
        ("equidistribution", equidistribution_suite),
        ("density dichotomy", density_suite),
        ("CLI determinism", determinism_suite),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {} ({:.1}s)", i + 1, v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
