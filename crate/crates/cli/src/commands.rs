//! One function per subcommand: an experiment in, a report and plot data out.

use anyhow::{anyhow, bail, Context, Result};
use qrlab::analysis::{
    equidistribution_report, fast_growth_check, growth_function, higher_integrability_check, prop4_check,
    reverse_holder_estimate, signed_check, Ball, BallFamily, HolderReport,
};
use qrlab::curves::{density_probe, distortion_sup, rational_obstruction};
use qrlab::exterior::{comass, pointwise_comass};
use qrlab::sampling::SampleSpec;
use qrlab::{Covector, FormField};

use crate::config::{Curve, Experiment};
use crate::report::{ReportBody, RunReport, Table};

pub const SUBCOMMANDS: [&str; 9] = ["comass", "distortion", "growth", "rhi", "prop4", "higherint", "equi", "density", "signed"];

/// Radii `2^0 … 2^6` when the config gives none.
pub const DEFAULT_RADII: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

const RECONSTRUCTION_TOL: f64 = 1e-8;

pub struct Outcome {
    pub report: RunReport,
    pub table: Option<Table>,
}

fn curve(e: &Experiment) -> Result<&Curve> {
    e.curve.as_ref().ok_or_else(|| anyhow!("this subcommand needs a [curve] section"))
}

fn form(e: &Experiment) -> Result<&FormField> {
    e.form.as_ref().ok_or_else(|| anyhow!("this subcommand needs a [form] section"))
}

fn samples(e: &Experiment, n: usize) -> SampleSpec {
    e.samples.clone().unwrap_or_else(|| SampleSpec::uniform_box(n, -5.0, 5.0, 1000, e.seed))
}

fn balls(e: &Experiment) -> Result<&BallFamily> {
    e.balls.as_ref().ok_or_else(|| anyhow!("this subcommand needs a [balls] section"))
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

pub fn run(command: &str, e: &Experiment) -> Result<Outcome> {
    let (pass, summary, body, table) = match command {
        "comass" => run_comass(e)?,
        "distortion" => run_distortion(e)?,
        "growth" => run_growth(e)?,
        "rhi" | "prop4" => run_holder(command, e)?,
        "higherint" => run_higherint(e)?,
        "equi" => run_equi(e)?,
        "density" => run_density(e)?,
        "signed" => run_signed(e)?,
        other => bail!("unknown subcommand {other:?}"),
    };
    let report = RunReport { command: command.to_string(), pass, summary, seed: e.seed, body };
    Ok(Outcome { report, table })
}

type Parts = (bool, String, ReportBody, Option<Table>);

fn run_comass(e: &Experiment) -> Result<Parts> {
    let expr = e.analysis.expr.as_deref().context("comass needs an expression (--expr or analysis.expr)")?;
    let dim = e.analysis.dim.context("comass needs an ambient dimension (--dim or analysis.dim)")?;
    let a = Covector::parse(expr, dim)?;
    let result = comass(&a, &e.optimizer);
    let pointwise = pointwise_comass(&a, &e.optimizer);
    let summary = format!("comass = {:.9} ({} restarts)", result.value, result.restarts);
    Ok((true, summary, ReportBody::Comass { result, pointwise }, None))
}

fn run_distortion(e: &Experiment) -> Result<Parts> {
    let c = curve(e)?;
    let f = c.map();
    let s = samples(e, f.domain_dim());
    let mut report = distortion_sup(f, form(e)?, &s, &e.optimizer)?;
    if let Some(t) = c.torus() {
        let bound = t.distortion_bound();
        report.bound = Some(bound);
        report.within_bound = report.k_hat.map(|k| k <= bound);
    }
    let pass = report.k_hat.is_some() && report.within_bound != Some(false);
    let summary = format!(
        "K_hat = {} over {} samples ({} degenerate), bound {}",
        fmt_opt(report.k_hat),
        report.evaluated,
        report.degenerate,
        fmt_opt(report.bound)
    );
    Ok((pass, summary, ReportBody::Distortion(report), None))
}

fn run_growth(e: &Experiment) -> Result<Parts> {
    let f = curve(e)?.map();
    let omega = form(e)?;
    let n = f.domain_dim();
    let radii = e.analysis.radii.clone().unwrap_or_else(|| DEFAULT_RADII.to_vec());
    let epsilon = e.analysis.epsilon.unwrap_or(n as f64);
    let growth = growth_function(f, omega, &radii, epsilon, &e.quadrature)?;
    let fast_growth = match (e.analysis.p, e.analysis.c_p) {
        (Some(p), Some(c_p)) => {
            Some(fast_growth_check(f, omega, &growth, c_p, p, e.analysis.r0.unwrap_or(1.0), &e.quadrature)?)
        }
        _ => None,
    };
    let pass = growth.monotone && fast_growth.as_ref().is_none_or(|v| v.pass);
    let mut summary = format!(
        "A(r_max) = {:.9}, tail slope {}, monotone {}",
        growth.rows.last().map_or(f64::NAN, |r| r.a.value),
        fmt_opt(growth.slope),
        growth.monotone
    );
    if let Some(v) = &fast_growth {
        summary.push_str(&format!(", fast growth {} (worst margin {:.3e})", v.pass, v.worst_margin));
    }
    let table = Table {
        header: vec!["r", "A", "A_error", "A_over_r", "A_over_r_eps"],
        rows: growth
            .rows
            .iter()
            .map(|row| vec![num(row.r), num(row.a.value), num(row.a.error_bound), num(row.a.value / row.r), num(row.normalized)])
            .collect(),
    };
    Ok((pass, summary, ReportBody::Growth { growth, fast_growth }, Some(table)))
}

fn holder_table(report: &HolderReport) -> Table {
    Table {
        header: vec!["ball", "radius", "center", "lhs", "rhs", "ratio", "flag"],
        rows: report
            .balls
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let center: Vec<String> = b.ball.center.iter().map(|x| num(*x)).collect();
                vec![
                    i.to_string(),
                    num(b.ball.radius),
                    center.join(" "),
                    num(b.lhs),
                    num(b.rhs),
                    opt(b.ratio),
                    b.flag.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    }
}

fn run_holder(command: &str, e: &Experiment) -> Result<Parts> {
    let f = curve(e)?.map();
    let omega = form(e)?;
    let family = balls(e)?;
    let report = if command == "rhi" {
        reverse_holder_estimate(f, omega, family, e.analysis.p.unwrap_or(2.0), &e.quadrature)?
    } else {
        prop4_check(f, omega, family, &e.quadrature)?
    };
    let flagged = report.balls.iter().filter(|b| b.flag.is_some()).count();
    let pass = match (report.c_hat, e.analysis.c_bound) {
        (Some(c), Some(bound)) => flagged == 0 && c <= bound,
        (Some(_), None) => flagged == 0,
        (None, _) => false,
    };
    let summary = format!(
        "C_hat = {} over {} balls ({} flagged){}",
        fmt_opt(report.c_hat),
        report.balls.len(),
        flagged,
        e.analysis.c_bound.map(|b| format!(", bound {b}")).unwrap_or_default()
    );
    let table = holder_table(&report);
    let body = if command == "rhi" { ReportBody::Rhi(report) } else { ReportBody::Prop4(report) };
    Ok((pass, summary, body, Some(table)))
}

fn run_higherint(e: &Experiment) -> Result<Parts> {
    let f = curve(e)?.map();
    let n = f.domain_dim();
    let ball = e.analysis.ball.clone().unwrap_or_else(|| Ball::centered(n, 1.0));
    let p = e.analysis.p.unwrap_or(2.0);
    let report = higher_integrability_check(f, form(e)?, &ball, p, e.analysis.k, &e.quadrature, &e.optimizer)?;
    let summary = format!(
        "∫‖Df‖^q = {:.9} vs bound {:.9} (K = {:.6}, q = {})",
        report.lhs.value, report.rhs, report.k, report.q
    );
    Ok((report.pass, summary, ReportBody::Higherint(report), None))
}

fn run_equi(e: &Experiment) -> Result<Parts> {
    let f = curve(e)?.map();
    let tau = e.tau.as_ref().context("equi needs a [tau] section")?;
    let radii = e.analysis.radii.clone().unwrap_or_else(|| DEFAULT_RADII.to_vec());
    let report = equidistribution_report(f, form(e)?, tau, &radii, e.analysis.delta, &e.quadrature)?;
    let pass = report.stokes_ok && report.decay_ok;
    let flagged = report.rows.iter().filter(|r| r.flagged).count();
    let summary = format!(
        "{} radii, {} flagged, log-measure {:.6}, Stokes {}, decay {}",
        report.rows.len(),
        flagged,
        report.log_measure,
        report.stokes_ok,
        report.decay_ok
    );
    let table = Table {
        header: vec!["r", "A0", "A", "ratio", "flagged", "sphere", "stokes_residual"],
        rows: report
            .rows
            .iter()
            .map(|row| {
                vec![
                    num(row.r),
                    num(row.a0.value),
                    num(row.a.value),
                    opt(row.ratio),
                    row.flagged.to_string(),
                    num(row.sphere.value),
                    num(row.stokes_residual),
                ]
            })
            .collect(),
    };
    Ok((pass, summary, ReportBody::Equi(report), Some(table)))
}

fn run_density(e: &Experiment) -> Result<Parts> {
    let t = curve(e)?.torus().context("density needs a torus_linear curve")?;
    let d = e.density.as_ref().context("density needs a [density] section")?;
    let v: Vec<f64> = d.v.iter().map(|s| s.value()).collect();
    let probe = density_probe(t, &v, &d.grid)?;
    let rational = t.slope().iter().all(|s| s.is_rational());
    let (pass, obstruction, summary) = if rational {
        let o = rational_obstruction(t.slope(), &d.v)?;
        let pass = probe.min_distance >= o.separation;
        let summary = format!(
            "rational slope: min distance {:.6} over {} nodes, |E| = {}, r = {:.6}, certified separation {:.6}",
            probe.min_distance, probe.nodes, o.order, o.r, o.separation
        );
        (pass, Some(o), summary)
    } else {
        let pass = probe.min_distance < d.threshold;
        let summary = format!(
            "irrational slope: min distance {:.6} over {} nodes, threshold {}",
            probe.min_distance, probe.nodes, d.threshold
        );
        (pass, None, summary)
    };
    let body = ReportBody::Density { probe, obstruction, threshold: d.threshold, rational };
    Ok((pass, summary, body, None))
}

fn run_signed(e: &Experiment) -> Result<Parts> {
    let f = curve(e)?.map();
    let rep = e.representation.as_ref().context("signed needs a [representation] section")?;
    let verdict = signed_check(rep, f, &samples(e, f.domain_dim()))?;
    let reconstruction_error = match &e.form {
        Some(omega) => Some(rep.reconstruction_error(omega, 256, e.seed)?),
        None => None,
    };
    let pass = verdict.signed && reconstruction_error.is_none_or(|r| r <= RECONSTRUCTION_TOL);
    let signs: Vec<String> = verdict.terms.iter().map(|t| format!("{:?}", t.sign).to_lowercase()).collect();
    let summary = format!(
        "{} term(s): [{}], reconstruction error {}",
        verdict.terms.len(),
        signs.join(", "),
        reconstruction_error.map_or_else(|| "n/a".into(), |r| format!("{r:.3e}"))
    );
    Ok((pass, summary, ReportBody::Signed { verdict, reconstruction_error }, None))
}
