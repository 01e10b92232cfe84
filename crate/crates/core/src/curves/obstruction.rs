//! The finite set `E ⊂ ℝ/ℤ` that keeps rational-slope torus lines away
//! from a point with rational base and irrational height.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{Rational, Scalar};

/// Larger subgroups are refused rather than enumerated.
pub const MAX_ORDER: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionSet {
    /// `E = (1/L)ℤ / ℤ`
    pub order: i64,
    pub elements: Vec<Rational>,
    /// `v_{n+1} mod 1`
    pub height: f64,
    pub min_circle_distance: f64,
    /// A quarter of the circle distance.
    pub r: f64,
    /// `min(r, r/(n·max|y_j|))`. No image point lies within this distance
    /// of `v`: such a point has base within it of a translate of `v`'s base,
    /// so its height is within `n·max|y_j|` times it of `E`.
    pub separation: f64,
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Builds `E = { Σ k_j y_j / q_j mod 1 }` where `v_j = p_j/q_j`, together
/// with the radius `r = dist(v_{n+1}, E)/4`.
pub fn rational_obstruction(y: &[Scalar], v: &[Scalar]) -> Result<ObstructionSet> {
    let n = y.len();
    if n == 0 || v.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!("slope of length {n} with a point of length {}", v.len())));
    }
    let ys: Vec<Rational> = y
        .iter()
        .map(|s| s.as_rational().ok_or_else(|| Error::InvalidArgument(format!("slope entry {s} is not rational"))))
        .collect::<Result<_>>()?;
    let base: Vec<Rational> = v[..n]
        .iter()
        .map(|s| s.as_rational().ok_or_else(|| Error::InvalidArgument(format!("base coordinate {s} is not rational"))))
        .collect::<Result<_>>()?;
    let height = match v[n] {
        Scalar::Real(h) if h.is_finite() => h,
        Scalar::Real(h) => return Err(Error::NonFinite { at: vec![h] }),
        Scalar::Rational(q) => {
            return Err(Error::InvalidArgument(format!(
                "height {q} is rational; the obstruction needs an irrational last coordinate"
            )))
        }
    };

    let mut order: i64 = 1;
    for (yj, vj) in ys.iter().zip(&base) {
        let g = yj / Rational::from_integer(*vj.denom());
        order = order
            .checked_mul(*g.denom() / order.gcd(g.denom()))
            .filter(|&l| l <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidArgument(format!("obstruction subgroup order exceeds {MAX_ORDER}")))?;
    }

    let t = height.rem_euclid(1.0);
    let lf = order as f64;
    let i0 = (t * lf).floor() as i64;
    let min_circle_distance = [i0.rem_euclid(order), (i0 + 1).rem_euclid(order)]
        .iter()
        .map(|&i| circle_distance(t, i as f64 / lf))
        .fold(f64::INFINITY, f64::min);
    if min_circle_distance == 0.0 {
        return Err(Error::InvalidArgument("height lies on E in floating point".into()));
    }
    let r = min_circle_distance / 4.0;
    let ymax = ys.iter().map(|q| (*q.numer() as f64 / *q.denom() as f64).abs()).fold(0.0, f64::max);
    let separation = if ymax > 0.0 { r.min(r / (n as f64 * ymax)) } else { r };
    Ok(ObstructionSet {
        order,
        elements: (0..order).map(|i| Rational::new(i, order)).collect(),
        height: t,
        min_circle_distance,
        r,
        separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::Rational(Rational::new(p, d))
    }

    /// Enumerates `Σ k_j g_j mod 1` for `0 ≤ k_j < denom(g_j)` directly.
    fn brute_force(y: &[Scalar], v: &[Scalar]) -> BTreeSet<Rational> {
        let gens: Vec<Rational> = y
            .iter()
            .zip(v)
            .map(|(a, b)| a.as_rational().unwrap() / Rational::from_integer(*b.as_rational().unwrap().denom()))
            .collect();
        let mut set = BTreeSet::from([Rational::from_integer(0)]);
        for g in gens {
            let mut next = BTreeSet::new();
            for s in &set {
                for k in 0..*g.denom() {
                    let x = s + g * Rational::from_integer(k);
                    next.insert(x - Rational::from_integer(x.floor().to_integer()));
                }
            }
            set = next;
        }
        set
    }

    #[test]
    fn sixth_roots_example() {
        let y = [q(1, 2), q(1, 3)];
        let v = [q(0, 1), q(0, 1), Scalar::Real(2f64.sqrt())];
        let e = rational_obstruction(&y, &v).unwrap();
        assert_eq!(e.order, 6);
        let expected: Vec<Rational> = (0..6).map(|i| Rational::new(i, 6)).collect();
        assert_eq!(e.elements, expected);
        assert_eq!(e.elements.iter().copied().collect::<BTreeSet<_>>(), brute_force(&y, &v));
        let oracle = ((2f64.sqrt() - 1.0) - 1.0 / 3.0).abs() / 4.0;
        assert!((e.r - oracle).abs() < 1e-15);
        assert!((e.r - 0.02022).abs() < 1e-5);
    }

    #[test]
    fn integer_and_zero_slopes() {
        let y = [q(1, 1); 3];
        let v = [q(0, 1), q(0, 1), q(0, 1), Scalar::Real(2f64.sqrt())];
        let e = rational_obstruction(&y, &v).unwrap();
        assert_eq!(e.order, 1);
        let s = 2f64.sqrt();
        assert!((e.r - (s - 1.0).min(2.0 - s) / 4.0).abs() < 1e-15);
        assert!((e.r - 0.10355).abs() < 1e-5);

        let y = [q(0, 1); 2];
        let v = [q(0, 1), q(0, 1), Scalar::Real(s / 4.0)];
        let e = rational_obstruction(&y, &v).unwrap();
        assert_eq!(e.order, 1);
        assert!((e.r - s / 16.0).abs() < 1e-15);
    }

    #[test]
    fn base_denominators_enlarge_the_group() {
        let y = [q(1, 2), q(2, 5)];
        let v = [q(1, 3), q(3, 4), Scalar::Real(0.5f64.sqrt())];
        let e = rational_obstruction(&y, &v).unwrap();
        assert_eq!(e.elements.iter().copied().collect::<BTreeSet<_>>(), brute_force(&y, &v));
        let naive = e.elements.iter().map(|x| circle_distance(e.height, *x.numer() as f64 / *x.denom() as f64));
        assert!((naive.fold(f64::INFINITY, f64::min) - e.min_circle_distance).abs() < 1e-15);
    }

    #[test]
    fn rejections() {
        let v = [q(0, 1), q(0, 1), Scalar::Real(2f64.sqrt())];
        assert!(rational_obstruction(&[Scalar::Real(2f64.sqrt()), q(1, 3)], &v).is_err());
        let v_rational = [q(0, 1), q(0, 1), q(1, 2)];
        assert!(rational_obstruction(&[q(1, 2), q(1, 3)], &v_rational).is_err());
        let v_real_base = [Scalar::Real(0.1), q(0, 1), Scalar::Real(2f64.sqrt())];
        assert!(rational_obstruction(&[q(1, 2), q(1, 3)], &v_real_base).is_err());
    }
}
