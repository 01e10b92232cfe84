use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::literal::parse_terms;
use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Largest supported ambient dimension; indices live in a `u32` bitmask.
pub const MAX_DIM: usize = 32;

/// A strictly increasing tuple of 1-based indices, `dx_{i1} ∧ … ∧ dx_{ik}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    mask: u32,
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { mask: 0 };

    /// Builds a multi-index from strictly increasing 1-based indices.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut last = 0usize;
        for &i in indices {
            if i == 0 || i > MAX_DIM {
                return Err(Error::InvalidMultiIndex(format!("index {i} outside 1..={MAX_DIM}")));
            }
            if i <= last {
                return Err(Error::InvalidMultiIndex(format!(
                    "indices {indices:?} are not strictly increasing"
                )));
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Ok(MultiIndex { mask })
    }

    /// Sorts arbitrary indices, returning the permutation sign, or `None`
    /// when an index repeats.
    pub fn sorted(indices: &[usize]) -> Result<Option<(i8, Self)>> {
        let mut v = indices.to_vec();
        let mut sign = 1i8;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Ok(None);
        }
        Ok(Some((sign, MultiIndex::new(&v)?)))
    }

    pub fn from_mask(mask: u32) -> Self {
        MultiIndex { mask }
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn degree(self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Ascending 1-based indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut m = self.mask;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.indices().collect()
    }

    pub fn max_index(self) -> usize {
        32 - self.mask.leading_zeros() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= MAX_DIM && self.mask & (1 << (i - 1)) != 0
    }

    /// Complement within `1..=dim`.
    pub fn complement(self, dim: usize) -> Self {
        let full = if dim >= 32 { u32::MAX } else { (1u32 << dim) - 1 };
        MultiIndex { mask: full & !self.mask }
    }

    /// Sign of the shuffle that sorts the concatenation `self · other`, or
    /// `None` if the two share an index.
    pub fn shuffle_sign(self, other: MultiIndex) -> Option<f64> {
        if self.mask & other.mask != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for j in other.indices() {
            // elements of self greater than j
            let above = if j >= 32 { 0 } else { self.mask >> j };
            inversions += above.count_ones();
        }
        Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
    }

    fn union(self, other: MultiIndex) -> Self {
        MultiIndex { mask: self.mask | other.mask }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(other.indices())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiIndex{:?}", self.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().map(|i| format!("dx{i}")).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// Determinant of a small square matrix given row-major.
///
/// Degrees up to three use the cofactor expansion so that integer-valued
/// matrices give exact results.
pub fn det(m: &[f64], k: usize) -> f64 {
    debug_assert_eq!(m.len(), k * k);
    match k {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            let mut a = m.to_vec();
            let mut d = 1.0;
            for c in 0..k {
                let (p, pv) = (c..k)
                    .map(|r| (r, a[r * k + c].abs()))
                    .fold((c, -1.0), |best, x| if x.1 > best.1 { x } else { best });
                if pv == 0.0 {
                    return 0.0;
                }
                if p != c {
                    for j in 0..k {
                        a.swap(p * k + j, c * k + j);
                    }
                    d = -d;
                }
                let piv = a[c * k + c];
                d *= piv;
                for r in c + 1..k {
                    let factor = a[r * k + c] / piv;
                    if factor != 0.0 {
                        for j in c..k {
                            a[r * k + j] -= factor * a[c * k + j];
                        }
                    }
                }
            }
            d
        }
    }
}

/// An element of Λᵏ(ℝᵐ) in the orthonormal basis `dx_I`.
#[derive(Clone, PartialEq)]
pub struct Covector {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl Covector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Covector { dim, degree, coeffs: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut z = Covector::zero(dim, 0);
        z.accumulate(MultiIndex::EMPTY, c);
        z.prune();
        z
    }

    /// `dx_1 ∧ … ∧ dx_m`.
    pub fn volume(dim: usize) -> Self {
        let idx: Vec<usize> = (1..=dim).collect();
        Covector::basis(dim, &idx).expect("volume multi-index is valid")
    }

    /// The basis covector `dx_{i1} ∧ … ∧ dx_{ik}` for strictly increasing
    /// 1-based indices.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        Covector::from_terms(dim, indices.len(), [(MultiIndex::new(indices)?, 1.0)])
    }

    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionMismatch(format!("ambient dimension {dim} outside 1..={MAX_DIM}")));
        }
        if degree > dim {
            return Err(Error::DegreeMismatch { expected: dim, found: degree });
        }
        let mut c = Covector::zero(dim, degree);
        for (idx, v) in terms {
            if idx.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: idx.degree() });
            }
            if idx.max_index() > dim {
                return Err(Error::InvalidMultiIndex(format!("{idx:?} exceeds dimension {dim}")));
            }
            c.accumulate(idx, v);
        }
        c.prune();
        Ok(c)
    }

    /// Parses a literal such as `"2.0 dx1^dx2 + 1.0 dx3^dx4"`. The degree is
    /// taken from the first term; a bare number is a degree-0 covector.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        Self::parse_inner(s, dim, None)
    }

    /// As [`Covector::parse`] with the degree fixed up front, so that `"0"`
    /// can denote the zero covector of any degree.
    pub fn parse_with_degree(s: &str, dim: usize, degree: usize) -> Result<Self> {
        Self::parse_inner(s, dim, Some(degree))
    }

    fn parse_inner(s: &str, dim: usize, degree: Option<usize>) -> Result<Self> {
        let terms = parse_terms(s)?;
        let mut out: Vec<(MultiIndex, f64)> = Vec::new();
        let mut deg = degree;
        for t in terms {
            if let Some(tag) = &t.tag {
                return Err(Error::Parse(format!("coefficient tag {tag:?} not allowed in a covector")));
            }
            let raw = t.basis.unwrap_or_default();
            if t.coefficient == 0.0 && raw.is_empty() && degree.is_some() {
                continue;
            }
            match deg {
                None => deg = Some(raw.len()),
                Some(d) if d != raw.len() => {
                    return Err(Error::DegreeMismatch { expected: d, found: raw.len() })
                }
                _ => {}
            }
            if let Some((sign, idx)) = MultiIndex::sorted(&raw)? {
                out.push((idx, f64::from(sign) * t.coefficient));
            }
        }
        Covector::from_terms(dim, deg.unwrap_or(0), out)
    }

    fn accumulate(&mut self, idx: MultiIndex, v: f64) {
        *self.coeffs.entry(idx).or_insert(0.0) += v;
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, v| v.abs() > PRUNE_THRESHOLD);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, idx: MultiIndex) -> f64 {
        self.coeffs.get(&idx).copied().unwrap_or(0.0)
    }

    /// Nonzero terms in lexicographic multi-index order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum_abs_coefficients(&self) -> f64 {
        self.coeffs.values().map(|v| v.abs()).sum()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = Covector::zero(self.dim, self.degree);
        for (k, v) in self.terms() {
            out.accumulate(k, c * v);
        }
        out.prune();
        out
    }

    fn check_same_space(&self, other: &Covector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Covector) -> Result<Self> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.accumulate(k, v);
        }
        out.prune();
        Ok(out)
    }

    pub fn wedge(&self, other: &Covector) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "wedge of covectors in dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let degree = self.degree + other.degree;
        let mut out = Covector::zero(self.dim, degree);
        if degree > self.dim {
            return Ok(out);
        }
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if let Some(s) = i.shuffle_sign(j) {
                    out.accumulate(i.union(j), s * a * b);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn hodge_star(&self) -> Self {
        let mut out = Covector::zero(self.dim, self.dim - self.degree);
        for (i, a) in self.terms() {
            let c = i.complement(self.dim);
            let s = i.shuffle_sign(c).expect("complement is disjoint");
            out.accumulate(c, s * a);
        }
        out.prune();
        out
    }

    pub fn inner(&self, other: &Covector) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self.terms().map(|(k, v)| v * other.get(k)).sum())
    }

    /// Evaluates the covector on the columns of an `m × k` matrix.
    pub fn apply(&self, frame: &DMatrix<f64>) -> Result<f64> {
        if frame.nrows() != self.dim || frame.ncols() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "covector in Λ^{}(ℝ^{}) applied to a {}×{} frame",
                self.degree,
                self.dim,
                frame.nrows(),
                frame.ncols()
            )));
        }
        Ok(self.apply_unchecked(frame))
    }

    pub(crate) fn apply_unchecked(&self, frame: &DMatrix<f64>) -> f64 {
        let k = self.degree;
        let mut buf = vec![0.0; k * k];
        let mut total = 0.0;
        for (idx, a) in self.terms() {
            for (r, row) in idx.indices().enumerate() {
                for c in 0..k {
                    buf[r * k + c] = frame[(row - 1, c)];
                }
            }
            total += a * det(&buf, k);
        }
        total
    }

    /// Evaluates the covector on a list of vectors in ℝᵐ.
    pub fn apply_vectors(&self, vectors: &[Vec<f64>]) -> Result<f64> {
        if vectors.iter().any(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch("vector length differs from ambient dimension".into()));
        }
        let m = DMatrix::from_fn(self.dim, vectors.len(), |i, j| vectors[j][i]);
        self.apply(&m)
    }
}

impl fmt::Debug for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Covector(Λ^{}(ℝ^{}): {})", self.degree, self.dim, self)
    }
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.terms().enumerate() {
            let sign = if v < 0.0 { "-" } else { "+" };
            match (n, k.degree()) {
                (0, 0) => write!(f, "{v:?}")?,
                (0, _) => write!(f, "{v:?} {k}")?,
                (_, 0) => write!(f, " {sign} {:?}", v.abs())?,
                _ => write!(f, " {sign} {:?} {k}", v.abs())?,
            }
        }
        Ok(())
    }
}

impl Add for &Covector {
    type Output = Covector;

    /// # Panics
    /// If the operands live in different spaces; see [`Covector::try_add`].
    fn add(self, rhs: &Covector) -> Covector {
        self.try_add(rhs).expect("covectors in the same space")
    }
}

impl Sub for &Covector {
    type Output = Covector;

    fn sub(self, rhs: &Covector) -> Covector {
        self.try_add(&rhs.scaled(-1.0)).expect("covectors in the same space")
    }
}

impl Neg for &Covector {
    type Output = Covector;

    fn neg(self) -> Covector {
        self.scaled(-1.0)
    }
}

impl Mul<&Covector> for f64 {
    type Output = Covector;

    fn mul(self, rhs: &Covector) -> Covector {
        rhs.scaled(self)
    }
}

#[derive(Serialize, Deserialize)]
struct CovectorRepr {
    dim: usize,
    degree: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl Serialize for Covector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CovectorRepr {
            dim: self.dim,
            degree: self.degree,
            terms: self.terms().map(|(k, v)| (k.to_vec(), v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Covector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CovectorRepr::deserialize(d)?;
        let terms = r
            .terms
            .iter()
            .map(|(idx, v)| MultiIndex::new(idx).map(|m| (m, *v)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Covector::from_terms(r.dim, r.degree, terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dx(dim: usize, idx: &[usize]) -> Covector {
        Covector::basis(dim, idx).unwrap()
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(&[1, 3, 4]).is_ok());
        assert!(MultiIndex::new(&[2, 1]).is_err());
        assert!(MultiIndex::new(&[1, 1]).is_err());
        assert!(MultiIndex::new(&[0]).is_err());
        assert!(Covector::basis(3, &[1, 4]).is_err());
        let (s, i) = MultiIndex::sorted(&[3, 1, 2]).unwrap().unwrap();
        assert_eq!((s, i.to_vec()), (1, vec![1, 2, 3]));
        let (s, _) = MultiIndex::sorted(&[2, 1]).unwrap().unwrap();
        assert_eq!(s, -1);
        assert!(MultiIndex::sorted(&[2, 2]).unwrap().is_none());
    }

    #[test]
    fn lexicographic_order() {
        let a = MultiIndex::new(&[1, 3]).unwrap();
        let b = MultiIndex::new(&[1, 2]).unwrap();
        let c = MultiIndex::new(&[2, 3]).unwrap();
        assert!(b < a && a < c);
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(dx(2, &[1]).wedge(&dx(2, &[2])).unwrap(), dx(2, &[1, 2]));
        assert_eq!(dx(2, &[2]).wedge(&dx(2, &[1])).unwrap(), -&dx(2, &[1, 2]));
        let w = &dx(4, &[1, 2]) + &dx(4, &[3, 4]);
        assert_eq!(w.wedge(&w).unwrap(), 2.0 * &dx(4, &[1, 2, 3, 4]));
        assert!(dx(2, &[1]).wedge(&dx(3, &[1])).is_err());
        let over = dx(2, &[1, 2]).wedge(&dx(2, &[1])).unwrap();
        assert!(over.is_zero());
        assert_eq!(over.degree(), 3);
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(dx(2, &[1, 2]).hodge_star(), Covector::scalar(2, 1.0));
        assert_eq!(dx(3, &[1]).hodge_star(), dx(3, &[2, 3]));
        assert_eq!(dx(3, &[2]).hodge_star(), -&dx(3, &[1, 3]));
        assert_eq!(dx(4, &[1, 3]).hodge_star().hodge_star(), dx(4, &[1, 3]));
    }

    #[test]
    fn inner_examples() {
        assert_eq!(dx(4, &[1, 2]).inner(&dx(4, &[1, 2])).unwrap(), 1.0);
        assert_eq!(dx(4, &[1, 2]).inner(&dx(4, &[1, 3])).unwrap(), 0.0);
        let a = &(2.0 * &dx(4, &[1, 2])) + &dx(4, &[3, 4]);
        let b = &dx(4, &[1, 2]) - &dx(4, &[3, 4]);
        assert_eq!(a.inner(&b).unwrap(), 1.0);
        assert!(dx(4, &[1, 2]).inner(&dx(4, &[1])).is_err());
    }

    #[test]
    fn pruning_keeps_canonical_zero() {
        let a = dx(3, &[1]);
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z, Covector::zero(3, 1));
        let tiny = Covector::from_terms(3, 1, [(MultiIndex::new(&[1]).unwrap(), 1e-15)]).unwrap();
        assert!(tiny.is_zero());
    }

    #[test]
    fn literal_parsing() {
        let a = Covector::parse("2.0 dx1^dx2 + 1.0 dx3^dx4", 4).unwrap();
        assert_eq!(a, &(2.0 * &dx(4, &[1, 2])) + &dx(4, &[3, 4]));
        let b = Covector::parse("dx2^dx1", 2).unwrap();
        assert_eq!(b, -&dx(2, &[1, 2]));
        assert!(Covector::parse("dx1^dx1", 2).unwrap().is_zero());
        assert!(Covector::parse("dx1 + dx1^dx2", 2).is_err());
        assert!(Covector::parse("dx5", 4).is_err());
        assert!(Covector::parse("sin@1 dx1", 2).is_err());
        assert_eq!(Covector::parse_with_degree("0", 3, 2).unwrap(), Covector::zero(3, 2));
        assert_eq!(Covector::parse("3", 2).unwrap(), Covector::scalar(2, 3.0));
    }

    #[test]
    fn apply_is_a_determinant() {
        let vol = Covector::volume(3);
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 3.0, 1.0, 1.0, 0.0, 1.0]);
        assert!((vol.apply(&m).unwrap() - m.determinant()).abs() < 1e-12);
        assert!(vol.apply(&DMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn elimination_determinant_matches_nalgebra() {
        let m = DMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.5 + (i == j) as u8 as f64);
        let rows: Vec<f64> = (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
        assert!((det(&rows, 5) - m.determinant()).abs() < 1e-9);
    }
}
