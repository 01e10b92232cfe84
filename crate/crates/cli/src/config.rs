//! Experiment configs: TOML with one table per component.
//!
//! Numbers may be written as TOML integers or floats, or as strings holding
//! `p/q` fractions and `sqrt:k` roots; integers and fractions stay exact.

use std::fmt;

use qrlab::analysis::{torus_signed_representation, Ball, BallFamily, RepresentationKind, SignedRepresentation, SignedTerm};
use qrlab::analysis::monomial_representation;
use qrlab::curves::{DMatrix, GridSpec};
use qrlab::exterior::parse_terms;
use qrlab::sampling::SampleSpec;
use qrlab::{
    Covector, CurveMap, FormField, OptimizerConfig, QuadratureMethod, QuadratureSpec, Scalar, TargetManifold,
    TorusLinearCurve,
};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Lit {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Lit {
    pub fn scalar(&self) -> Result<Scalar, String> {
        match self {
            Lit::Int(i) => Ok(Scalar::from(*i)),
            Lit::Float(x) => Ok(Scalar::Real(*x)),
            Lit::Text(s) => s.parse::<Scalar>().map_err(|e| e.to_string()),
        }
    }

    pub fn real(&self) -> Result<f64, String> {
        self.scalar().map(|s| s.value())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub curve: Option<CurveSection>,
    pub form: Option<FormSection>,
    pub tau: Option<FormSection>,
    pub representation: Option<RepresentationSection>,
    pub analysis: Option<AnalysisSection>,
    pub balls: Option<BallFamily>,
    pub samples: Option<SampleSpec>,
    pub quadrature: Option<QuadratureSection>,
    pub optimizer: Option<OptimizerSection>,
    pub density: Option<DensitySection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub kind: String,
    pub y: Option<Vec<Lit>>,
    pub n: Option<usize>,
    pub matrix: Option<Vec<Vec<Lit>>>,
    pub target: Option<String>,
    pub scale: Option<Lit>,
    pub point: Option<Vec<Lit>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSection {
    pub expr: Option<String>,
    pub degree: Option<usize>,
    pub closed: Option<bool>,
    pub sup_bound: Option<Lit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSection {
    pub phi: String,
    pub alpha: String,
    pub beta: String,
    pub phi_bound: Option<Lit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSection {
    /// `monomial`, `torus`, `r-linear` or `f-signed`.
    pub kind: String,
    pub degree: Option<usize>,
    pub xi: Option<String>,
    pub terms: Option<Vec<TermSection>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub radii: Option<Vec<Lit>>,
    pub epsilon: Option<Lit>,
    pub p: Option<Lit>,
    pub c_p: Option<Lit>,
    pub r0: Option<Lit>,
    pub delta: Option<Lit>,
    pub k: Option<Lit>,
    pub center: Option<Vec<Lit>>,
    pub radius: Option<Lit>,
    pub c_bound: Option<Lit>,
    pub expr: Option<String>,
    pub dim: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub method: Option<QuadratureMethod>,
    pub radial: Option<usize>,
    pub angular: Option<usize>,
    pub samples: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub restarts: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub v: Vec<Lit>,
    pub lo: Lit,
    pub hi: Lit,
    pub step: Lit,
    pub threshold: Option<Lit>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub json: Option<String>,
    pub csv: Option<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub p: Option<f64>,
    pub delta: Option<f64>,
    pub budget: Option<usize>,
    pub out: Option<String>,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone)]
pub enum Curve {
    Torus(TorusLinearCurve),
    Map(CurveMap),
}

impl Curve {
    pub fn map(&self) -> &CurveMap {
        match self {
            Curve::Torus(t) => t.curve_ref(),
            Curve::Map(m) => m,
        }
    }

    pub fn torus(&self) -> Option<&TorusLinearCurve> {
        match self {
            Curve::Torus(t) => Some(t),
            Curve::Map(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DensitySetup {
    pub v: Vec<Scalar>,
    pub grid: GridSpec,
    pub threshold: f64,
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisParams {
    pub radii: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub p: Option<f64>,
    pub c_p: Option<f64>,
    pub r0: Option<f64>,
    pub delta: Option<f64>,
    pub k: Option<f64>,
    pub ball: Option<Ball>,
    pub c_bound: Option<f64>,
    pub expr: Option<String>,
    pub dim: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub seed: u64,
    pub workers: Option<usize>,
    pub curve: Option<Curve>,
    pub form: Option<FormField>,
    pub tau: Option<FormField>,
    pub representation: Option<SignedRepresentation>,
    pub balls: Option<BallFamily>,
    pub samples: Option<SampleSpec>,
    pub quadrature: QuadratureSpec,
    pub optimizer: OptimizerConfig,
    pub density: Option<DensitySetup>,
    pub analysis: AnalysisParams,
    pub json_path: Option<String>,
    pub csv_path: Option<String>,
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn push(&mut self, path: &str, message: impl fmt::Display) {
        self.0.push(Diagnostic { path: path.to_string(), message: message.to_string() });
    }

    fn real(&mut self, path: &str, lit: &Option<Lit>) -> Option<f64> {
        lit.as_ref().and_then(|l| l.real().map_err(|e| self.push(path, e)).ok())
    }

    fn reals(&mut self, path: &str, lits: &[Lit]) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(lits.len());
        let mut ok = true;
        for (i, l) in lits.iter().enumerate() {
            match l.real() {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.push(&format!("{path}[{i}]"), e);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn scalars(&mut self, path: &str, lits: &[Lit]) -> Option<Vec<Scalar>> {
        let mut out = Vec::with_capacity(lits.len());
        let mut ok = true;
        for (i, l) in lits.iter().enumerate() {
            match l.scalar() {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.push(&format!("{path}[{i}]"), e);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err("matrix rows must be nonempty and of equal length".into());
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// Degree of a literal, read off its first basis term.
fn literal_degree(s: &str) -> Option<usize> {
    parse_terms(s).ok()?.into_iter().find_map(|t| t.basis.map(|b| b.len()))
}

fn parse_target(s: &str) -> Result<TargetManifold, String> {
    let (kind, dim) = s.split_once(':').ok_or_else(|| format!("expected `euclidean:m` or `torus:m`, got {s:?}"))?;
    let m: usize = dim.trim().parse().map_err(|_| format!("bad dimension in {s:?}"))?;
    match kind.trim() {
        "euclidean" => Ok(TargetManifold::Euclidean(m)),
        "torus" => Ok(TargetManifold::FlatTorus(m)),
        other => Err(format!("unknown target kind {other:?}")),
    }
}

fn build_curve(c: &CurveSection, diag: &mut Collector) -> Option<Curve> {
    let target = match &c.target {
        Some(t) => match parse_target(t) {
            Ok(t) => Some(t),
            Err(e) => {
                diag.push("curve.target", e);
                return None;
            }
        },
        None => None,
    };
    let need_n = |diag: &mut Collector| {
        if c.n.is_none() {
            diag.push("curve.n", "missing domain dimension");
        }
        c.n
    };
    let result = match c.kind.as_str() {
        "torus_linear" => {
            let Some(y) = &c.y else {
                diag.push("curve.y", "torus_linear curves need a slope vector");
                return None;
            };
            let y = diag.scalars("curve.y", y)?;
            if c.n.is_some_and(|n| n != y.len()) {
                diag.push("curve.n", format!("n = {} but the slope has {} entries", c.n.unwrap(), y.len()));
                return None;
            }
            TorusLinearCurve::new(y).map(Curve::Torus)
        }
        "builtin:identity" => CurveMap::identity(need_n(diag)?).map(Curve::Map),
        "builtin:polynomial" => CurveMap::polynomial_demo(need_n(diag)?).map(Curve::Map),
        "builtin:scaling" => {
            let n = need_n(diag)?;
            let s = diag.real("curve.scale", &c.scale).or_else(|| {
                diag.push("curve.scale", "missing scale factor");
                None
            })?;
            CurveMap::scaling(n, s).map(Curve::Map)
        }
        "builtin:linear" => {
            let Some(rows) = &c.matrix else {
                diag.push("curve.matrix", "linear curves need a matrix");
                return None;
            };
            let mut vals = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                vals.push(diag.reals(&format!("curve.matrix[{i}]"), row)?);
            }
            let a = match matrix_from_rows(&vals) {
                Ok(a) => a,
                Err(e) => {
                    diag.push("curve.matrix", e);
                    return None;
                }
            };
            let target = target.unwrap_or(TargetManifold::Euclidean(a.nrows()));
            CurveMap::linear(a, target).map(Curve::Map)
        }
        "builtin:constant" => {
            let n = need_n(diag)?;
            let Some(p) = &c.point else {
                diag.push("curve.point", "constant curves need a value");
                return None;
            };
            let p = diag.reals("curve.point", p)?;
            let target = target.unwrap_or(TargetManifold::Euclidean(p.len()));
            CurveMap::constant(n, p, target).map(Curve::Map)
        }
        other => {
            diag.push("curve.kind", format!("unknown curve kind {other:?}"));
            return None;
        }
    };
    // builtins other than linear/constant live on ℝⁿ unless told otherwise
    let result = match (result, target, c.kind.as_str()) {
        (Ok(Curve::Map(m)), Some(t), "builtin:identity" | "builtin:polynomial" | "builtin:scaling") => {
            if t.dim() < m.domain_dim() {
                Err(qrlab::Error::DimensionMismatch(format!(
                    "domain dimension n = {} exceeds target dimension m = {}",
                    m.domain_dim(),
                    t.dim()
                )))
            } else if t != *m.target() {
                Err(qrlab::Error::InvalidArgument(format!("{} maps into {:?} only", c.kind, m.target())))
            } else {
                Ok(Curve::Map(m))
            }
        }
        (r, _, _) => r,
    };
    result.map_err(|e| diag.push("curve", e)).ok()
}

fn default_top_form(curve: &Curve) -> Option<FormField> {
    match curve {
        Curve::Torus(t) => Some(t.standard_form()),
        Curve::Map(m) if m.target().dim() == m.domain_dim() => {
            let t = *m.target();
            FormField::constant(t, &Covector::volume(t.dim())).ok()
        }
        Curve::Map(_) => None,
    }
}

fn build_form(path: &str, s: &FormSection, curve: &Curve, expected: usize, diag: &mut Collector) -> Option<FormField> {
    let degree = s.degree.unwrap_or(expected);
    if degree != expected {
        let what = if path == "tau" { "n − 1" } else { "n" };
        diag.push(&format!("{path}.degree"), format!("expected {what} = {expected}, found {degree}"));
        return None;
    }
    let target = *curve.map().target();
    let bound = diag.real(&format!("{path}.sup_bound"), &s.sup_bound);
    match &s.expr {
        Some(expr) => FormField::parse(target, degree, expr, s.closed.unwrap_or(false), bound)
            .map_err(|e| diag.push(&format!("{path}.expr"), e))
            .ok(),
        None if path == "form" => {
            let f = default_top_form(curve);
            if f.is_none() {
                diag.push("form.expr", "no default top-degree form for this target; give an expression");
            }
            f
        }
        None => {
            diag.push(&format!("{path}.expr"), "missing form expression");
            None
        }
    }
}

fn build_representation(s: &RepresentationSection, curve: Option<&Curve>, form: Option<&FormField>, diag: &mut Collector) -> Option<SignedRepresentation> {
    let target = match curve {
        Some(c) => *c.map().target(),
        None => {
            diag.push("representation", "requires a [curve] section to fix the target");
            return None;
        }
    };
    let m = target.dim();
    let res = match s.kind.as_str() {
        "monomial" => match form {
            Some(f) => monomial_representation(f),
            None => {
                diag.push("representation.kind", "monomial splitting needs a [form]");
                return None;
            }
        },
        "torus" => {
            let Some(l) = s.degree else {
                diag.push("representation.degree", "torus representations need ℓ");
                return None;
            };
            let xi = match &s.xi {
                Some(x) => match Covector::parse_with_degree(x, m, l) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        diag.push("representation.xi", e);
                        return None;
                    }
                },
                None => None,
            };
            torus_signed_representation(l, target, xi.as_ref())
        }
        "r-linear" | "f-signed" => {
            let kind = if s.kind == "r-linear" { RepresentationKind::RLinear } else { RepresentationKind::FSigned };
            let Some(terms) = &s.terms else {
                diag.push("representation.terms", "explicit representations need terms");
                return None;
            };
            let n = curve.map(|c| c.map().domain_dim()).unwrap_or(0);
            let mut built = Vec::new();
            for (i, t) in terms.iter().enumerate() {
                let p = format!("representation.terms[{i}]");
                let bound = diag.real(&format!("{p}.phi_bound"), &t.phi_bound);
                let phi = FormField::parse(target, 0, &t.phi, true, bound).map_err(|e| diag.push(&format!("{p}.phi"), e)).ok();
                let la = literal_degree(&t.alpha).unwrap_or(0);
                let alpha = FormField::parse(target, la, &t.alpha, true, None).map_err(|e| diag.push(&format!("{p}.alpha"), e)).ok();
                let beta = FormField::parse(target, n.saturating_sub(la), &t.beta, true, None)
                    .map_err(|e| diag.push(&format!("{p}.beta"), e))
                    .ok();
                if let (Some(phi), Some(alpha), Some(beta)) = (phi, alpha, beta) {
                    built.push(SignedTerm { phi, alpha, beta });
                }
            }
            if built.len() != terms.len() {
                return None;
            }
            SignedRepresentation::new(kind, built)
        }
        other => {
            diag.push("representation.kind", format!("unknown representation kind {other:?}"));
            return None;
        }
    };
    res.map_err(|e| diag.push("representation", e)).ok()
}

fn reseed_samples(s: SampleSpec, seed: u64) -> SampleSpec {
    match s {
        SampleSpec::UniformBox { dim, lo, hi, count, .. } => SampleSpec::UniformBox { dim, lo, hi, count, seed },
        other => other,
    }
}

fn reseed_balls(b: BallFamily, seed: u64) -> BallFamily {
    match b {
        BallFamily::Random { dim, count, center_lo, center_hi, r_min, r_max, .. } => {
            BallFamily::Random { dim, count, center_lo, center_hi, r_min, r_max, seed }
        }
        other => other,
    }
}

impl Experiment {
    /// Parses and validates a config, returning every violated constraint.
    pub fn from_toml(text: &str, ov: &Overrides) -> Result<Experiment, Vec<Diagnostic>> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            vec![Diagnostic { path: "config".into(), message: e.to_string().trim_end().replace('\n', " ") }]
        })?;
        Self::from_raw(raw, ov)
    }

    pub fn from_raw(raw: RawConfig, ov: &Overrides) -> Result<Experiment, Vec<Diagnostic>> {
        let mut diag = Collector(Vec::new());
        let seed = ov.seed.or(raw.seed).unwrap_or(0);

        let curve = raw.curve.as_ref().and_then(|c| build_curve(c, &mut diag));
        let n = curve.as_ref().map(|c| c.map().domain_dim());

        let form = match (&raw.form, &curve) {
            (Some(s), Some(c)) => build_form("form", s, c, c.map().domain_dim(), &mut diag),
            (None, Some(c)) => default_top_form(c),
            (Some(_), None) => {
                diag.push("form", "requires a [curve] section to fix the target");
                None
            }
            (None, None) => None,
        };
        let tau = match (&raw.tau, &curve) {
            (Some(s), Some(c)) => build_form("tau", s, c, c.map().domain_dim() - 1, &mut diag),
            (Some(_), None) => {
                diag.push("tau", "requires a [curve] section to fix the target");
                None
            }
            _ => None,
        };
        let representation = raw
            .representation
            .as_ref()
            .and_then(|r| build_representation(r, curve.as_ref(), form.as_ref(), &mut diag));

        let q = raw.quadrature.unwrap_or_default();
        let mut quadrature = QuadratureSpec::default_for(n.unwrap_or(2));
        if let Some(m) = q.method {
            quadrature.method = m;
        }
        quadrature.radial = q.radial.unwrap_or(quadrature.radial);
        quadrature.angular = q.angular.unwrap_or(quadrature.angular);
        quadrature.samples = q.samples.unwrap_or(quadrature.samples);
        quadrature.tol = q.tol.unwrap_or(quadrature.tol);
        quadrature.seed = ov.seed.or(q.seed).unwrap_or(seed);
        if let Some(b) = ov.budget.or(q.budget) {
            quadrature = quadrature.with_budget(b);
        }
        if let Some(n) = n {
            if let Err(e) = quadrature.validate(n) {
                diag.push("quadrature", e);
            }
        }

        let o = raw.optimizer.unwrap_or_default();
        let defaults = OptimizerConfig::default();
        let optimizer = OptimizerConfig {
            restarts: o.restarts.unwrap_or(defaults.restarts),
            tol: o.tol.unwrap_or(defaults.tol),
            max_iter: o.max_iter.unwrap_or(defaults.max_iter),
            seed: ov.seed.or(o.seed).unwrap_or(seed),
        };
        if optimizer.restarts == 0 {
            diag.push("optimizer.restarts", "need at least one restart");
        }

        let samples = raw.samples.map(|s| if ov.seed.is_some() { reseed_samples(s, seed) } else { s });
        if let (Some(SampleSpec::UniformBox { dim, .. }), Some(n)) = (&samples, n) {
            if *dim != n {
                diag.push("samples.dim", format!("expected n = {n}, found {dim}"));
            }
        }
        let balls = raw.balls.map(|b| if ov.seed.is_some() { reseed_balls(b, seed) } else { b });
        if let Some(b) = &balls {
            match b.balls() {
                Ok(list) => {
                    if let Some(n) = n {
                        if list.iter().any(|ball| ball.center.len() != n) {
                            diag.push("balls", format!("ball centers must lie in ℝ^{n}"));
                        }
                    }
                }
                Err(e) => diag.push("balls", e),
            }
        }

        let a = raw.analysis.unwrap_or_default();
        let mut analysis = AnalysisParams {
            radii: a.radii.as_ref().and_then(|r| diag.reals("analysis.radii", r)),
            epsilon: diag.real("analysis.epsilon", &a.epsilon),
            p: diag.real("analysis.p", &a.p),
            c_p: diag.real("analysis.c_p", &a.c_p),
            r0: diag.real("analysis.r0", &a.r0),
            delta: diag.real("analysis.delta", &a.delta),
            k: diag.real("analysis.k", &a.k),
            ball: None,
            c_bound: diag.real("analysis.c_bound", &a.c_bound),
            expr: a.expr.clone(),
            dim: a.dim,
        };
        if let Some(r) = &ov.radii {
            analysis.radii = Some(r.clone());
        }
        if let Some(p) = ov.p {
            analysis.p = Some(p);
        }
        if let Some(d) = ov.delta {
            analysis.delta = Some(d);
        }
        if let Some(radii) = &analysis.radii {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
                diag.push("analysis.radii", "radii must be positive and strictly increasing");
            }
        }
        if analysis.p.is_some_and(|p| !(p > 1.0)) {
            diag.push("analysis.p", "p must exceed 1");
        }
        if let (Some(d), Some(n)) = (analysis.delta, n) {
            let lo = (n as f64 - 1.0) / n as f64;
            if !(d > lo && d < 1.0) {
                diag.push("analysis.delta", format!("δ must lie in ({lo}, 1)"));
            }
        }
        if a.center.is_some() || a.radius.is_some() {
            let center = a.center.as_ref().and_then(|c| diag.reals("analysis.center", c));
            let radius = diag.real("analysis.radius", &a.radius);
            match (center, radius) {
                (Some(center), Some(radius)) if radius > 0.0 => {
                    if n.is_some_and(|n| n != center.len()) {
                        diag.push("analysis.center", format!("expected {} coordinates", n.unwrap()));
                    }
                    analysis.ball = Some(Ball { center, radius });
                }
                (_, Some(_)) if a.center.is_none() => {
                    analysis.ball = n.map(|n| Ball::centered(n, radius.unwrap()));
                }
                (_, Some(r)) => diag.push("analysis.radius", format!("radius {r} must be positive")),
                _ => {}
            }
        }

        let density = raw.density.as_ref().and_then(|d| {
            let v = diag.scalars("density.v", &d.v)?;
            let lo = diag.real("density.lo", &Some(d.lo.clone()))?;
            let hi = diag.real("density.hi", &Some(d.hi.clone()))?;
            let step = diag.real("density.step", &Some(d.step.clone()))?;
            let threshold = diag.real("density.threshold", &d.threshold).unwrap_or(0.05);
            let dim = match curve.as_ref().and_then(Curve::torus) {
                Some(t) => t.n(),
                None => {
                    diag.push("density", "density probes need a torus_linear curve");
                    return None;
                }
            };
            if v.len() != dim + 1 {
                diag.push("density.v", format!("expected {} coordinates, found {}", dim + 1, v.len()));
                return None;
            }
            let grid = GridSpec::cube(dim, lo, hi, step).map_err(|e| diag.push("density", e)).ok()?;
            Some(DensitySetup { v, grid, threshold })
        });

        if let Some(w) = ov.workers.or(raw.workers) {
            if w == 0 {
                diag.push("workers", "need at least one worker");
            }
        }
        let out = raw.output.unwrap_or_default();
        if !diag.0.is_empty() {
            return Err(diag.0);
        }
        Ok(Experiment {
            seed,
            workers: ov.workers.or(raw.workers),
            curve,
            form,
            tau,
            representation,
            balls,
            samples,
            quadrature,
            optimizer,
            density,
            analysis,
            json_path: ov.out.clone().or(out.json),
            csv_path: ov.csv.clone().or(out.csv),
        })
    }
}
