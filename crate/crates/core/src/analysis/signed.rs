use serde::{Deserialize, Serialize};

use crate::curves::{operator_norm, CurveMap};
use crate::error::{Error, Result};
use crate::exterior::{Covector, MultiIndex};
use crate::manifold::{FormField, TargetManifold};
use crate::sampling::{uniform_box_points, SampleSpec};

/// Sign threshold relative to `Σ|a_I| · ‖Df‖ⁿ`, which bounds `|⋆f*(α∧β)|`.
pub const SIGN_ETA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepresentationKind {
    FSigned,
    RLinear,
}

#[derive(Debug, Clone)]
pub struct SignedTerm {
    pub phi: FormField,
    pub alpha: FormField,
    pub beta: FormField,
}

/// `ω = Σ φ_i α_i ∧ β_i` with bounded `φ_i` and closed `α_i`, `β_i`.
#[derive(Debug, Clone)]
pub struct SignedRepresentation {
    kind: RepresentationKind,
    terms: Vec<SignedTerm>,
}

impl SignedRepresentation {
    pub fn new(kind: RepresentationKind, terms: Vec<SignedTerm>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidArgument("representation has no terms".into()))?;
        let target = *first.phi.target();
        let n = first.alpha.degree() + first.beta.degree();
        for (i, t) in terms.iter().enumerate() {
            if [t.phi.target(), t.alpha.target(), t.beta.target()].iter().any(|m| **m != target) {
                return Err(Error::DimensionMismatch(format!("term {i} mixes target manifolds")));
            }
            if t.phi.degree() != 0 {
                return Err(Error::DegreeMismatch { expected: 0, found: t.phi.degree() });
            }
            let l = t.alpha.degree();
            if l + t.beta.degree() != n {
                return Err(Error::DegreeMismatch { expected: n, found: l + t.beta.degree() });
            }
            if l < 1 || l + 1 > n {
                return Err(Error::InvalidArgument(format!("term {i} has ℓ = {l} outside [1, {}]", n.saturating_sub(1))));
            }
            if !(t.alpha.closed && t.beta.closed) {
                return Err(Error::InvalidArgument(format!("term {i}: α and β must be declared closed")));
            }
            if t.phi.sup_bound.is_none() {
                return Err(Error::InvalidArgument(format!("term {i}: φ needs a sup bound")));
            }
            if kind == RepresentationKind::RLinear && !t.phi.is_constant() {
                return Err(Error::InvalidArgument(format!("term {i}: R-linear representations need constant φ")));
            }
        }
        Ok(SignedRepresentation { kind, terms })
    }

    pub fn kind(&self) -> RepresentationKind {
        self.kind
    }

    pub fn terms(&self) -> &[SignedTerm] {
        &self.terms
    }

    pub fn target(&self) -> &TargetManifold {
        self.terms[0].phi.target()
    }

    pub fn degree(&self) -> usize {
        self.terms[0].alpha.degree() + self.terms[0].beta.degree()
    }

    /// `Σ φ_i(p) α_i(p) ∧ β_i(p)`
    pub fn reconstruct(&self, p: &[f64]) -> Result<Covector> {
        let mut acc = Covector::zero(self.target().dim(), self.degree());
        for t in &self.terms {
            let phi = t.phi.eval(p)?.get(MultiIndex::from_mask(0));
            acc = acc.try_add(&t.alpha.eval(p)?.wedge(&t.beta.eval(p)?)?.scaled(phi))?;
        }
        Ok(acc)
    }

    /// Largest coefficient-norm gap between the reconstruction and `omega`
    /// at random points (fundamental domain on tori, `[-2, 2]ᵐ` otherwise).
    pub fn reconstruction_error(&self, omega: &FormField, samples: usize, seed: u64) -> Result<f64> {
        if omega.target() != self.target() || omega.degree() != self.degree() {
            return Err(Error::DegreeMismatch { expected: self.degree(), found: omega.degree() });
        }
        let m = self.target().dim();
        let (lo, hi) = if self.target().is_torus() { (0.0, 1.0) } else { (-2.0, 2.0) };
        let mut worst: f64 = 0.0;
        for p in uniform_box_points(m, lo, hi, samples, seed) {
            let gap = (&self.reconstruct(&p)? - &omega.eval(&p)?).norm();
            if gap > worst {
                worst = gap;
            }
        }
        Ok(worst)
    }
}

/// One term per monomial `c·dx_I` of a constant form: `φ = c`,
/// `α = dx_{i₁}`, `β = dx_{I∖i₁}`.
pub fn monomial_representation(omega: &FormField) -> Result<SignedRepresentation> {
    if !omega.is_constant() {
        return Err(Error::InvalidArgument("monomial splitting needs a constant-coefficient form".into()));
    }
    let target = *omega.target();
    let m = target.dim();
    if omega.degree() < 2 {
        return Err(Error::InvalidArgument("monomial splitting needs degree at least 2".into()));
    }
    let value = omega.eval(&vec![0.0; m])?;
    let mut terms = Vec::new();
    for (idx, c) in value.terms() {
        let ids = idx.to_vec();
        let alpha = FormField::constant(target, &Covector::basis(m, &ids[..1])?)?;
        let beta = FormField::constant(target, &Covector::basis(m, &ids[1..])?)?;
        let phi = FormField::constant(target, &Covector::scalar(m, c))?;
        terms.push(SignedTerm { phi, alpha, beta });
    }
    if terms.is_empty() {
        return Err(Error::InvalidArgument("zero form has no monomials".into()));
    }
    SignedRepresentation::new(RepresentationKind::RLinear, terms)
}

/// `vol = ξ ∧ ⋆ξ` on a flat torus with `ξ` a constant ℓ-form scaled so that
/// `∫ ξ ∧ ⋆ξ` equals the volume of the fundamental domain. `ξ` defaults to
/// `dx₁ ∧ … ∧ dx_ℓ`.
pub fn torus_signed_representation(l: usize, target: TargetManifold, xi: Option<&Covector>) -> Result<SignedRepresentation> {
    let m = match target {
        TargetManifold::FlatTorus(m) => m,
        TargetManifold::Euclidean(_) => {
            return Err(Error::UnsupportedTarget("harmonic splitting is built for flat tori".into()))
        }
    };
    if l < 1 || l >= m {
        return Err(Error::InvalidArgument(format!("ℓ = {l} outside [1, {}]", m - 1)));
    }
    let xi = match xi {
        Some(x) => x.clone(),
        None => Covector::basis(m, &(1..=l).collect::<Vec<_>>())?,
    };
    if xi.dim() != m || xi.degree() != l {
        return Err(Error::DegreeMismatch { expected: l, found: xi.degree() });
    }
    let norm = xi.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("ξ must be nonzero".into()));
    }
    // ξ ∧ ⋆ξ = |ξ|² vol and the fundamental domain has unit volume
    let xi = xi.scaled(1.0 / norm);
    let term = SignedTerm {
        phi: FormField::constant(target, &Covector::scalar(m, 1.0))?,
        alpha: FormField::constant(target, &xi)?,
        beta: FormField::constant(target, &xi.hodge_star())?,
    };
    SignedRepresentation::new(RepresentationKind::FSigned, vec![term])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Nonnegative,
    Nonpositive,
    Mixed,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermVerdict {
    pub sign: Sign,
    pub min: f64,
    pub max: f64,
    /// A sample with a positive and one with a negative value, for `mixed`.
    pub witnesses: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignVerdict {
    pub samples: String,
    pub terms: Vec<TermVerdict>,
    /// No term is `mixed` on the samples.
    pub signed: bool,
}

/// Classifies `⋆f*(α_i ∧ β_i)` on the samples for every term.
pub fn signed_check(rep: &SignedRepresentation, f: &CurveMap, samples: &SampleSpec) -> Result<SignVerdict> {
    if rep.target() != f.target() || rep.degree() != f.domain_dim() {
        return Err(Error::DimensionMismatch("representation does not match the curve".into()));
    }
    let points = samples.points();
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let n = f.domain_dim() as i32;
    let mut terms = Vec::with_capacity(rep.terms().len());
    for t in rep.terms() {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut pos, mut neg) = (None, None);
        for x in &points {
            let fx = f.eval(x)?;
            let d = f.differential(x)?;
            let cov = t.alpha.eval(&fx)?.wedge(&t.beta.eval(&fx)?)?;
            let v = cov.apply(&d)?;
            let eta = SIGN_ETA * cov.sum_abs_coefficients() * operator_norm(&d).powi(n);
            min = min.min(v);
            max = max.max(v);
            if v > eta && pos.is_none() {
                pos = Some(x.clone());
            } else if v < -eta && neg.is_none() {
                neg = Some(x.clone());
            }
        }
        let sign = match (&pos, &neg) {
            (Some(_), Some(_)) => Sign::Mixed,
            (Some(_), None) => Sign::Nonnegative,
            (None, Some(_)) => Sign::Nonpositive,
            (None, None) => Sign::Zero,
        };
        let witnesses = match (pos, neg) {
            (Some(p), Some(q)) => Some((p, q)),
            _ => None,
        };
        terms.push(TermVerdict { sign, min, max, witnesses });
    }
    let signed = terms.iter().all(|t| t.sign != Sign::Mixed);
    Ok(SignVerdict { samples: samples.describe(), terms, signed })
}
