use crate::error::{Error, Result};
use crate::exterior::{parse_terms, pointwise_comass, Covector, MultiIndex, OptimizerConfig};
use crate::sampling::uniform_box_points;

use super::{Coefficient, TargetManifold};

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct FormTerm {
    pub coefficient: Coefficient,
    pub basis: MultiIndex,
}

/// A degree-k differential form `Σ c_t(x) dx_{I_t}` on a target manifold.
///
/// `closed` and `sup_bound` are declarations; [`FormField::closedness_residual`]
/// and [`FormField::sampled_sup_comass`] test them statistically.
#[derive(Debug, Clone)]
pub struct FormField {
    target: TargetManifold,
    degree: usize,
    terms: Vec<FormTerm>,
    pub closed: bool,
    pub sup_bound: Option<f64>,
}

impl FormField {
    pub fn new(
        target: TargetManifold,
        degree: usize,
        terms: Vec<FormTerm>,
        closed: bool,
        sup_bound: Option<f64>,
    ) -> Result<Self> {
        let m = target.dim();
        if degree > m {
            return Err(Error::DegreeMismatch { expected: m, found: degree });
        }
        for t in &terms {
            if t.basis.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: t.basis.degree() });
            }
            if t.basis.max_index() > m {
                return Err(Error::InvalidMultiIndex(format!("{:?} exceeds dimension {m}", t.basis)));
            }
            if t.coefficient.max_coord().is_some_and(|c| c >= m) {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient {:?} reads a coordinate beyond dimension {m}",
                    t.coefficient
                )));
            }
            if target.is_torus() && !t.coefficient.is_periodic() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {:?} is not ℤ^{m}-periodic",
                    t.coefficient
                )));
            }
        }
        Ok(FormField { target, degree, terms, closed, sup_bound })
    }

    /// Constant-coefficient field; closed, bounded by the comass-sandwich
    /// upper bound `Σ|a_I|`.
    pub fn constant(target: TargetManifold, value: &Covector) -> Result<Self> {
        if value.dim() != target.dim() {
            return Err(Error::DimensionMismatch(format!(
                "covector in ℝ^{} on a {}-dimensional target",
                value.dim(),
                target.dim()
            )));
        }
        let terms = value
            .terms()
            .map(|(basis, c)| FormTerm { coefficient: Coefficient::Const(c), basis })
            .collect();
        FormField::new(target, value.degree(), terms, true, Some(value.sum_abs_coefficients()))
    }

    /// Parses a form literal: covector literal terms with an optional
    /// catalog tag between number and basis, e.g.
    /// `"2 dx1^dx2 + 1 sin@3 dx1^dx2"`. When `sup_bound` is `None` a bound
    /// is derived from the catalog where possible.
    pub fn parse(
        target: TargetManifold,
        degree: usize,
        literal: &str,
        closed: bool,
        sup_bound: Option<f64>,
    ) -> Result<Self> {
        let mut terms = Vec::new();
        for t in parse_terms(literal)? {
            let raw = t.basis.unwrap_or_default();
            if raw.is_empty() && t.coefficient == 0.0 && t.tag.is_none() {
                continue;
            }
            if raw.len() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: raw.len() });
            }
            let Some((sign, basis)) = MultiIndex::sorted(&raw)? else { continue };
            let amp = f64::from(sign) * t.coefficient;
            let coefficient = match t.tag.as_deref() {
                None => Coefficient::Const(amp),
                Some(tag) => Coefficient::from_tag(tag, amp)?,
            };
            terms.push(FormTerm { coefficient, basis });
        }
        let mut f = FormField::new(target, degree, terms, closed, None)?;
        f.sup_bound = sup_bound.or_else(|| f.structural_bound());
        Ok(f)
    }

    /// `Σ_t sup|c_t|`, when every coefficient has a structural bound; this
    /// bounds the comass by the sandwich inequality.
    pub fn structural_bound(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.coefficient.sup_bound()).sum()
    }

    pub fn target(&self) -> &TargetManifold {
        &self.target
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[FormTerm] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient.is_constant())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.target.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} on a {}-dimensional target",
                x.len(),
                self.target.dim()
            )));
        }
        Ok(())
    }

    /// The fiber covector `ω_x`.
    pub fn eval(&self, x: &[f64]) -> Result<Covector> {
        self.check_point(x)?;
        let values: Vec<(MultiIndex, f64)> = self
            .terms
            .iter()
            .map(|t| (t.basis, t.coefficient.eval(x)))
            .collect();
        if values.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { at: x.to_vec() });
        }
        Covector::from_terms(self.target.dim(), self.degree, values)
    }

    /// `dω` at `x`, assembled from partial derivatives of the coefficients:
    /// analytic where known, central differences with step `h` otherwise.
    pub fn exterior_derivative_at(&self, x: &[f64], h: f64) -> Result<Covector> {
        self.check_point(x)?;
        let m = self.target.dim();
        if self.degree == m {
            return Ok(Covector::zero(m, m + 1));
        }
        let mut out = Vec::new();
        for t in &self.terms {
            for j in 0..m {
                let dj = MultiIndex::new(&[j + 1])?;
                if let Some(s) = dj.shuffle_sign(t.basis) {
                    let d = t.coefficient.partial_at(j, x, h);
                    out.push((MultiIndex::from_mask(dj.mask() | t.basis.mask()), s * d));
                }
            }
        }
        Covector::from_terms(m, self.degree + 1, out)
    }

    /// `dω` as a field of degree k+1 (declared closed). Catalog
    /// coefficients are differentiated exactly; custom ones by central
    /// differences with step `h` unless they carry a gradient.
    pub fn exterior_derivative_field(&self, h: f64) -> Result<FormField> {
        let m = self.target.dim();
        if self.degree == m {
            return Err(Error::DegreeMismatch { expected: m - 1, found: m });
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            for j in 0..m {
                let dj = MultiIndex::new(&[j + 1])?;
                if let Some(s) = dj.shuffle_sign(t.basis) {
                    let d = t.coefficient.partial(j, h);
                    if !d.is_zero() {
                        terms.push(FormTerm {
                            coefficient: d.scaled(s),
                            basis: MultiIndex::from_mask(dj.mask() | t.basis.mask()),
                        });
                    }
                }
            }
        }
        let mut f = FormField::new(self.target, self.degree + 1, terms, true, None)?;
        f.sup_bound = f.structural_bound();
        Ok(f)
    }

    pub fn scaled(&self, s: f64) -> FormField {
        FormField {
            target: self.target,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|t| FormTerm { coefficient: t.coefficient.scaled(s), basis: t.basis })
                .collect(),
            closed: self.closed,
            sup_bound: self.sup_bound.map(|b| b * s.abs()),
        }
    }

    fn check_compatible(&self, other: &FormField) -> Result<()> {
        if self.target != other.target {
            return Err(Error::DimensionMismatch(format!(
                "forms on {:?} and {:?}",
                self.target, other.target
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let sup_bound = match (self.sup_bound, other.sup_bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ok(FormField {
            target: self.target,
            degree: self.degree,
            terms,
            closed: self.closed && other.closed,
            sup_bound,
        })
    }

    pub fn sub(&self, other: &FormField) -> Result<FormField> {
        self.add(&other.scaled(-1.0))
    }

    /// Pointwise product `self ∧ other`. Closedness of the product is
    /// declared only when both factors are closed.
    pub fn wedge(&self, other: &FormField) -> Result<FormField> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        let m = self.target.dim();
        if degree > m {
            return Err(Error::DegreeMismatch { expected: m, found: degree });
        }
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if let Some(s) = a.basis.shuffle_sign(b.basis) {
                    let coefficient = match (&a.coefficient, &b.coefficient) {
                        (Coefficient::Const(x), Coefficient::Const(y)) => Coefficient::Const(s * x * y),
                        (x, y) => Coefficient::Product(vec![x.clone(), y.clone()]).scaled(s),
                    };
                    terms.push(FormTerm {
                        coefficient,
                        basis: MultiIndex::from_mask(a.basis.mask() | b.basis.mask()),
                    });
                }
            }
        }
        let sup_bound = match (self.sup_bound, other.sup_bound) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        Ok(FormField { target: self.target, degree, terms, closed: self.closed && other.closed, sup_bound })
    }

    fn sample_points(&self, samples: usize, seed: u64) -> Vec<Vec<f64>> {
        let m = self.target.dim();
        if self.target.is_torus() {
            uniform_box_points(m, 0.0, 1.0, samples, seed)
        } else {
            uniform_box_points(m, -2.0, 2.0, samples, seed)
        }
    }

    /// Largest `|dω|` (coefficient norm) relative to `1 + |ω|` over random
    /// samples: the fundamental domain on tori, `[-2,2]ᵐ` otherwise.
    pub fn closedness_residual(&self, samples: usize, seed: u64, h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in self.sample_points(samples, seed) {
            let d = self.exterior_derivative_at(&p, h)?;
            let scale = 1.0 + self.eval(&p)?.norm();
            worst = worst.max(d.norm() / scale);
        }
        Ok(worst)
    }

    /// Largest sampled pointwise comass.
    pub fn sampled_sup_comass(&self, samples: usize, seed: u64, cfg: &OptimizerConfig) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for p in self.sample_points(samples, seed) {
            sup = sup.max(pointwise_comass(&self.eval(&p)?, cfg));
        }
        Ok(sup)
    }

    /// Checks the declared metadata: closedness within `1e-6` and the
    /// declared bound within a factor `1 + 1e-6`. Returns the violations.
    pub fn validate_declarations(&self, samples: usize, seed: u64) -> Result<Vec<String>> {
        let mut issues = Vec::new();
        if self.closed {
            let r = self.closedness_residual(samples, seed, DEFAULT_FD_STEP)?;
            if r > 1e-6 {
                issues.push(format!("declared closed but sampled |dω| reaches {r:.3e}"));
            }
        }
        if let Some(b) = self.sup_bound {
            let s = self.sampled_sup_comass(samples, seed, &OptimizerConfig { restarts: 8, ..Default::default() })?;
            if s > b * (1.0 + 1e-6) {
                issues.push(format!("declared sup_bound {b} but sampled comass reaches {s}"));
            }
        }
        Ok(issues)
    }
}
