//! Scalars that remember whether they are exact rationals.
//!
//! Literals accepted by [`Scalar::from_str`]:
//!
//! * integers and `p/q` fractions, kept exact;
//! * `sqrt:k` where `k` is a nonnegative integer or fraction, exact when `k`
//!   is a perfect square of a rational and a float otherwise;
//! * decimals (`0.5`, `1e-3`), kept as floats.
//!
//! Floats are treated as irrational by the obstruction machinery; a decimal
//! literal is a user assertion that the value is not meant to be rational.

use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Real(f64),
}

impl Scalar {
    pub fn value(&self) -> f64 {
        match *self {
            Scalar::Rational(q) => *q.numer() as f64 / *q.denom() as f64,
            Scalar::Real(x) => x,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match *self {
            Scalar::Rational(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(k: i64) -> Self {
        Scalar::Rational(Rational::from_integer(k))
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        Some(Rational::new(p, q))
    } else {
        s.parse::<i64>().ok().map(Rational::from_integer)
    }
}

fn exact_sqrt(k: i64) -> Option<i64> {
    if k < 0 {
        return None;
    }
    let r = k.sqrt();
    (r * r == k).then_some(r)
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let sign = if neg { -1 } else { 1 };
        if let Some(arg) = body.strip_prefix("sqrt:") {
            let k = parse_rational(arg)
                .ok_or_else(|| Error::Parse(format!("bad sqrt argument in {s:?}")))?;
            if k < Rational::from_integer(0) {
                return Err(Error::Parse(format!("negative sqrt argument in {s:?}")));
            }
            return Ok(match (exact_sqrt(*k.numer()), exact_sqrt(*k.denom())) {
                (Some(p), Some(q)) => Scalar::Rational(Rational::new(sign * p, q)),
                _ => {
                    let x = (*k.numer() as f64 / *k.denom() as f64).sqrt();
                    Scalar::Real(sign as f64 * x)
                }
            });
        }
        if let Some(q) = parse_rational(body) {
            return Ok(Scalar::Rational(q * sign));
        }
        body.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(|x| Scalar::Real(sign as f64 * x))
            .ok_or_else(|| Error::Parse(format!("not a number: {s:?}")))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) if *q.denom() == 1 => write!(f, "{}", q.numer()),
            Scalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Real(x) => write!(f, "{x:?}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_literal_form() {
        assert_eq!("1/2".parse::<Scalar>().unwrap(), Scalar::Rational(Rational::new(1, 2)));
        assert_eq!("-3".parse::<Scalar>().unwrap(), Scalar::Rational(Rational::from_integer(-3)));
        assert_eq!("sqrt:4".parse::<Scalar>().unwrap(), Scalar::Rational(Rational::from_integer(2)));
        assert_eq!("sqrt:9/4".parse::<Scalar>().unwrap(), Scalar::Rational(Rational::new(3, 2)));
        assert_eq!("sqrt:2".parse::<Scalar>().unwrap(), Scalar::Real(2f64.sqrt()));
        assert_eq!("-sqrt:2".parse::<Scalar>().unwrap(), Scalar::Real(-(2f64.sqrt())));
        assert_eq!("sqrt:1/8".parse::<Scalar>().unwrap(), Scalar::Real((0.125f64).sqrt()));
        assert_eq!("0.25".parse::<Scalar>().unwrap(), Scalar::Real(0.25));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("sqrt:-1".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1/2", "-7/3", "4", "1.4142135623730951"] {
            let x: Scalar = s.parse().unwrap();
            assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x);
        }
    }
}
