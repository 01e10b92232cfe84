use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qrlab_cli::{run, Experiment, Overrides};

#[derive(Parser)]
#[command(name = "qrlab", version, about = "Numerical checks for signed quasiregular curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for every random stream; overrides all seeds in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    out: Option<String>,
    /// CSV path for plot data.
    #[arg(long)]
    csv: Option<String>,
    /// Comma-separated radius schedule.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Total quadrature nodes or Monte Carlo samples.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Comass of a constant covector.
    Comass {
        #[command(flatten)]
        common: Common,
        /// Covector literal, e.g. "1.0 dx1^dx2 + 1.0 dx3^dx4".
        #[arg(long)]
        expr: Option<String>,
        /// Ambient dimension.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Sampled distortion supremum.
    Distortion(Common),
    /// Growth function and the fast-growth inequality.
    Growth(Common),
    /// Reverse Hölder constant over a ball family.
    Rhi(Common),
    /// Reverse Hölder variant with exponent n/(n+1) on full balls.
    Prop4(Common),
    /// Higher integrability of the differential.
    Higherint(Common),
    /// Equidistribution ratios and exceptional radii.
    Equi(Common),
    /// Density probe and rational obstruction for torus linear curves.
    Density(Common),
    /// Sign classification of a representation.
    Signed(Common),
    /// Report every config constraint violation without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())),
        None => Ok(String::new()),
    }
}

fn overrides(c: &Common) -> Overrides {
    Overrides {
        seed: c.seed,
        workers: c.workers,
        radii: c.radii.clone(),
        p: c.p,
        delta: c.delta,
        budget: c.budget,
        out: c.out.clone(),
        csv: c.csv.clone(),
    }
}

fn execute(name: &str, common: &Common, extra: Option<(Option<String>, Option<usize>)>) -> Result<ExitCode> {
    let text = read(&common.config)?;
    let mut exp = match Experiment::from_toml(&text, &overrides(common)) {
        Ok(e) => e,
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            return Ok(ExitCode::from(1));
        }
    };
    if let Some((expr, dim)) = extra {
        exp.analysis.expr = expr.or(exp.analysis.expr);
        exp.analysis.dim = dim.or(exp.analysis.dim);
    }
    if let Some(w) = exp.workers {
        // a second initialisation can only fail inside one process; ignore it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let outcome = match run(name, &exp) {
        Ok(o) => o,
        Err(e) if matches!(e.downcast_ref::<qrlab::Error>(), Some(qrlab::Error::SignViolation { .. })) => {
            println!("{name}: FAIL {e}");
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e),
    };
    let json_path = exp.json_path.clone().unwrap_or_else(|| format!("qrlab-{name}.json"));
    fs::write(&json_path, outcome.report.to_json()?).with_context(|| format!("cannot write {json_path}"))?;
    if let (Some(path), Some(table)) = (&exp.csv_path, &outcome.table) {
        fs::write(path, table.to_csv()?).with_context(|| format!("cannot write {path}"))?;
    }
    let verdict = if outcome.report.pass { "PASS" } else { "FAIL" };
    println!("{name}: {verdict} {}", outcome.report.summary);
    Ok(ExitCode::from(if outcome.report.pass { 0 } else { 2 }))
}

fn validate(path: &PathBuf) -> Result<ExitCode> {
    let text = read(&Some(path.clone()))?;
    match Experiment::from_toml(&text, &Overrides::default()) {
        Ok(_) => {
            println!("{}: valid", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Err(diags) => {
            for d in &diags {
                println!("{d}");
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Comass { common, expr, dim } => execute("comass", common, Some((expr.clone(), *dim))),
        Command::Distortion(c) => execute("distortion", c, None),
        Command::Growth(c) => execute("growth", c, None),
        Command::Rhi(c) => execute("rhi", c, None),
        Command::Prop4(c) => execute("prop4", c, None),
        Command::Higherint(c) => execute("higherint", c, None),
        Command::Equi(c) => execute("equi", c, None),
        Command::Density(c) => execute("density", c, None),
        Command::Signed(c) => execute("signed", c, None),
        Command::Validate { config } => validate(config),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}
