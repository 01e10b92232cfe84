use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Coefficient function of a form term, evaluated in covering coordinates.
///
/// The built-in catalog is closed under partial differentiation, so
/// exterior derivatives of catalog fields are exact. `Custom` coefficients
/// fall back to central differences unless a gradient is supplied.
#[derive(Clone)]
pub enum Coefficient {
    Const(f64),
    /// `amp · sin(2π · freq · x[coord])`
    Sin { amp: f64, coord: usize, freq: f64 },
    /// `amp · cos(2π · freq · x[coord])`
    Cos { amp: f64, coord: usize, freq: f64 },
    /// `amp · x[coord]`; not periodic.
    Linear { amp: f64, coord: usize },
    Sum(Vec<Coefficient>),
    Product(Vec<Coefficient>),
    Custom {
        label: String,
        value: ScalarFn,
        gradient: Option<GradientFn>,
        periodic: bool,
        /// Declared bound on `|value|`, if any.
        bound: Option<f64>,
    },
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "{c:?}"),
            Coefficient::Sin { amp, coord, freq } => write!(f, "{amp:?}·sin(2π·{freq:?}·x{})", coord + 1),
            Coefficient::Cos { amp, coord, freq } => write!(f, "{amp:?}·cos(2π·{freq:?}·x{})", coord + 1),
            Coefficient::Linear { amp, coord } => write!(f, "{amp:?}·x{}", coord + 1),
            Coefficient::Sum(v) => f.debug_tuple("Sum").field(v).finish(),
            Coefficient::Product(v) => f.debug_tuple("Product").field(v).finish(),
            Coefficient::Custom { label, .. } => write!(f, "custom({label})"),
        }
    }
}

impl Coefficient {
    /// Scalar function with an optional analytic gradient.
    pub fn custom<F>(label: impl Into<String>, value: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Coefficient::Custom {
            label: label.into(),
            value: Arc::new(value),
            gradient: None,
            periodic: false,
            bound: None,
        }
    }

    pub fn with_gradient<G>(self, gradient: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        match self {
            Coefficient::Custom { label, value, periodic, bound, .. } => Coefficient::Custom {
                label,
                value,
                gradient: Some(Arc::new(gradient)),
                periodic,
                bound,
            },
            other => other,
        }
    }

    /// Declares a custom coefficient ℤᵐ-periodic.
    pub fn periodic(self) -> Self {
        match self {
            Coefficient::Custom { label, value, gradient, bound, .. } => {
                Coefficient::Custom { label, value, gradient, periodic: true, bound }
            }
            other => other,
        }
    }

    pub fn bounded_by(self, b: f64) -> Self {
        match self {
            Coefficient::Custom { label, value, gradient, periodic, .. } => {
                Coefficient::Custom { label, value, gradient, periodic, bound: Some(b) }
            }
            other => other,
        }
    }

    /// Parses a catalog tag: `const`, `sin@j`, `sin@j:k`, `cos@j`, `cos@j:k`,
    /// `lin@j`. Coordinates are 1-based; `k` is the frequency multiplier of
    /// `2π`. The coefficient is scaled by `amp`.
    pub fn from_tag(tag: &str, amp: f64) -> Result<Self> {
        if tag == "const" {
            return Ok(Coefficient::Const(amp));
        }
        let (func, arg) = tag
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("unknown coefficient tag {tag:?}")))?;
        let (coord, freq) = match arg.split_once(':') {
            Some((c, k)) => (c, Some(k)),
            None => (arg, None),
        };
        let coord: usize = coord
            .parse()
            .ok()
            .filter(|&c| c >= 1)
            .ok_or_else(|| Error::Parse(format!("bad coordinate in tag {tag:?}")))?;
        let freq = match freq {
            Some(k) => k
                .parse::<crate::number::Scalar>()
                .map_err(|_| Error::Parse(format!("bad frequency in tag {tag:?}")))?
                .value(),
            None => 1.0,
        };
        let coord = coord - 1;
        match func {
            "sin" => Ok(Coefficient::Sin { amp, coord, freq }),
            "cos" => Ok(Coefficient::Cos { amp, coord, freq }),
            "lin" if freq == 1.0 => Ok(Coefficient::Linear { amp, coord }),
            _ => Err(Error::Parse(format!("unknown coefficient tag {tag:?}"))),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Sin { amp, coord, freq } => amp * (TAU * freq * x[*coord]).sin(),
            Coefficient::Cos { amp, coord, freq } => amp * (TAU * freq * x[*coord]).cos(),
            Coefficient::Linear { amp, coord } => amp * x[*coord],
            Coefficient::Sum(v) => v.iter().map(|c| c.eval(x)).sum(),
            Coefficient::Product(v) => v.iter().map(|c| c.eval(x)).product(),
            Coefficient::Custom { value, .. } => value(x),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Coefficient::Const(c) => Coefficient::Const(s * c),
            Coefficient::Sin { amp, coord, freq } => Coefficient::Sin { amp: s * amp, coord: *coord, freq: *freq },
            Coefficient::Cos { amp, coord, freq } => Coefficient::Cos { amp: s * amp, coord: *coord, freq: *freq },
            Coefficient::Linear { amp, coord } => Coefficient::Linear { amp: s * amp, coord: *coord },
            Coefficient::Sum(v) => Coefficient::Sum(v.iter().map(|c| c.scaled(s)).collect()),
            other => Coefficient::Product(vec![Coefficient::Const(s), other.clone()]),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Coefficient::Const(_) => true,
            Coefficient::Sin { amp, .. } | Coefficient::Cos { amp, .. } | Coefficient::Linear { amp, .. } => {
                *amp == 0.0
            }
            Coefficient::Sum(v) => v.iter().all(Coefficient::is_constant),
            Coefficient::Product(v) => {
                v.iter().all(Coefficient::is_constant) || v.iter().any(|c| c.is_zero())
            }
            Coefficient::Custom { .. } => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Const(c) => *c == 0.0,
            Coefficient::Sin { amp, .. } | Coefficient::Cos { amp, .. } | Coefficient::Linear { amp, .. } => {
                *amp == 0.0
            }
            Coefficient::Sum(v) => v.iter().all(Coefficient::is_zero),
            Coefficient::Product(v) => v.iter().any(Coefficient::is_zero),
            Coefficient::Custom { .. } => false,
        }
    }

    /// ℤᵐ-periodicity: trigonometric terms need integer frequencies.
    pub fn is_periodic(&self) -> bool {
        match self {
            Coefficient::Const(_) => true,
            Coefficient::Sin { freq, amp, .. } | Coefficient::Cos { freq, amp, .. } => {
                *amp == 0.0 || freq.fract() == 0.0
            }
            Coefficient::Linear { amp, .. } => *amp == 0.0,
            Coefficient::Sum(v) | Coefficient::Product(v) => v.iter().all(Coefficient::is_periodic),
            Coefficient::Custom { periodic, .. } => *periodic,
        }
    }

    /// A bound on `sup |c|` when one follows from the structure.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            Coefficient::Const(c) => Some(c.abs()),
            Coefficient::Sin { amp, .. } | Coefficient::Cos { amp, .. } => Some(amp.abs()),
            Coefficient::Linear { amp, .. } => (*amp == 0.0).then_some(0.0),
            Coefficient::Sum(v) => v.iter().map(Coefficient::sup_bound).sum(),
            Coefficient::Product(v) => v.iter().map(Coefficient::sup_bound).product(),
            Coefficient::Custom { bound, .. } => *bound,
        }
    }

    /// Largest coordinate index read (0-based), if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Coefficient::Const(_) | Coefficient::Custom { .. } => None,
            Coefficient::Sin { coord, .. } | Coefficient::Cos { coord, .. } | Coefficient::Linear { coord, .. } => {
                Some(*coord)
            }
            Coefficient::Sum(v) | Coefficient::Product(v) => v.iter().filter_map(Coefficient::max_coord).max(),
        }
    }

    /// Whether `∂/∂x_j` is known in closed form.
    pub fn has_analytic_derivative(&self) -> bool {
        match self {
            Coefficient::Sum(v) | Coefficient::Product(v) => v.iter().all(Coefficient::has_analytic_derivative),
            Coefficient::Custom { gradient, .. } => gradient.is_some(),
            _ => true,
        }
    }

    /// `∂/∂x_j` as a coefficient. Custom coefficients without a gradient get
    /// a central-difference closure with step `h`.
    pub fn partial(&self, j: usize, h: f64) -> Coefficient {
        match self {
            Coefficient::Const(_) => Coefficient::Const(0.0),
            Coefficient::Sin { amp, coord, freq } if *coord == j => {
                Coefficient::Cos { amp: amp * TAU * freq, coord: *coord, freq: *freq }
            }
            Coefficient::Cos { amp, coord, freq } if *coord == j => {
                Coefficient::Sin { amp: -amp * TAU * freq, coord: *coord, freq: *freq }
            }
            Coefficient::Linear { amp, coord } if *coord == j => Coefficient::Const(*amp),
            Coefficient::Sin { .. } | Coefficient::Cos { .. } | Coefficient::Linear { .. } => Coefficient::Const(0.0),
            Coefficient::Sum(v) => {
                Coefficient::Sum(v.iter().map(|c| c.partial(j, h)).filter(|c| !c.is_zero()).collect())
            }
            Coefficient::Product(v) => {
                let mut terms = Vec::new();
                for i in 0..v.len() {
                    let d = v[i].partial(j, h);
                    if d.is_zero() {
                        continue;
                    }
                    let mut factors = v.clone();
                    factors[i] = d;
                    terms.push(Coefficient::Product(factors));
                }
                Coefficient::Sum(terms)
            }
            Coefficient::Custom { label, value, gradient, periodic, .. } => {
                let label = format!("d{label}/dx{}", j + 1);
                match gradient {
                    Some(g) => {
                        let g = g.clone();
                        Coefficient::Custom {
                            label,
                            value: Arc::new(move |x| g(x)[j]),
                            gradient: None,
                            periodic: *periodic,
                            bound: None,
                        }
                    }
                    None => {
                        let f = value.clone();
                        Coefficient::Custom {
                            label,
                            value: Arc::new(move |x| central_difference(&*f, x, j, h)),
                            gradient: None,
                            periodic: *periodic,
                            bound: None,
                        }
                    }
                }
            }
        }
    }

    /// `∂c/∂x_j` at `x`: analytic where available, central differences
    /// with step `h` otherwise.
    pub fn partial_at(&self, j: usize, x: &[f64], h: f64) -> f64 {
        match self {
            Coefficient::Custom { value, gradient, .. } => match gradient {
                Some(g) => g(x)[j],
                None => central_difference(&**value, x, j, h),
            },
            _ => self.partial(j, h).eval(x),
        }
    }
}

pub(crate) fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], j: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut q = x.to_vec();
    p[j] += h;
    q[j] -= h;
    (f(&p) - f(&q)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags() {
        let s = Coefficient::from_tag("sin@3", 2.0).unwrap();
        assert!((s.eval(&[0.0, 0.0, 0.25]) - 2.0).abs() < 1e-15);
        let c = Coefficient::from_tag("cos@1:2", 1.0).unwrap();
        assert!((c.eval(&[0.25]) + 1.0).abs() < 1e-15);
        let l = Coefficient::from_tag("lin@2", 3.0).unwrap();
        assert_eq!(l.eval(&[5.0, 7.0]), 21.0);
        assert!(!l.is_periodic());
        assert!(Coefficient::from_tag("tan@1", 1.0).is_err());
        assert!(Coefficient::from_tag("sin@0", 1.0).is_err());
        assert!(!Coefficient::from_tag("sin@1:1/2", 1.0).unwrap().is_periodic());
    }

    #[test]
    fn analytic_partials_match_differences() {
        let c = Coefficient::Product(vec![
            Coefficient::Sin { amp: 1.5, coord: 0, freq: 2.0 },
            Coefficient::Sum(vec![Coefficient::Const(2.0), Coefficient::Cos { amp: 1.0, coord: 1, freq: 1.0 }]),
        ]);
        let x = [0.13, 0.71];
        for j in 0..2 {
            let exact = c.partial(j, 1e-5).eval(&x);
            let fd = central_difference(&|p: &[f64]| c.eval(p), &x, j, 1e-6);
            assert!((exact - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn custom_partials() {
        let c = Coefficient::custom("x0*x1", |x| x[0] * x[1]);
        assert!(!c.has_analytic_derivative());
        assert!((c.partial_at(0, &[2.0, 3.0], 1e-5) - 3.0).abs() < 1e-9);
        let g = c.with_gradient(|x| vec![x[1], x[0]]);
        assert!(g.has_analytic_derivative());
        assert_eq!(g.partial_at(1, &[2.0, 3.0], 1e-5), 2.0);
    }
}
