use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rational = Ratio<i64>;

/// Lebesgue exponent in `(0, inf]`, kept exact so regime boundaries such as
/// `q = 1` or `p = r` are decided without rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn finite(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parameter("zero denominator".into()));
        }
        Self::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(r: Rational) -> Result<Self> {
        if r <= Rational::zero() {
            return Err(Error::Parameter(format!("exponent {r} must be positive")));
        }
        Ok(Exponent::Finite(r))
    }

    pub fn integer(n: i64) -> Self {
        Exponent::Finite(Ratio::from_integer(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    pub fn ratio(&self) -> Option<Rational> {
        match self {
            Exponent::Finite(r) => Some(*r),
            Exponent::Infinite => None,
        }
    }

    /// The finite value, or an `Unsupported` error for `inf`.
    pub fn require_finite(&self, what: &str) -> Result<Rational> {
        self.ratio()
            .ok_or_else(|| Error::Unsupported(format!("{what} = inf is not allowed here")))
    }

    pub fn to_scalar<T: Scalar>(&self) -> T {
        match self {
            Exponent::Finite(r) => ratio_to_scalar(*r),
            Exponent::Infinite => T::infinity(),
        }
    }
}

pub fn ratio_to_scalar<T: Scalar>(r: Rational) -> T {
    let n = T::from_i64(*r.numer()).expect("numerator fits scalar");
    let d = T::from_i64(*r.denom()).expect("denominator fits scalar");
    n / d
}

/// Approximates a float by a rational with bounded denominator (continued fractions).
pub fn ratio_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    for _ in 0..40 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > 1_000_000_000 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a as f64;
        if frac.abs() < 1e-15 || ((h1 as f64 / k1 as f64) - x.abs()).abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Ratio::new(h1, k1);
    Some(if neg { -r } else { r })
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write_ratio(f, *r),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

pub(crate) fn write_ratio(f: &mut fmt::Formatter<'_>, r: Rational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(r) => {
                if r.is_integer() {
                    serializer.serialize_i64(*r.numer())
                } else {
                    serializer.serialize_f64(r.to_f64().unwrap_or(f64::NAN))
                }
            }
            Exponent::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive() {
        assert!(Exponent::finite(0, 1).is_err());
        assert!(Exponent::finite(-1, 2).is_err());
        assert!(Exponent::finite(3, 2).is_ok());
    }

    #[test]
    fn float_to_ratio() {
        assert_eq!(ratio_from_f64(0.5), Some(Ratio::new(1, 2)));
        assert_eq!(ratio_from_f64(-1.25), Some(Ratio::new(-5, 4)));
        assert_eq!(ratio_from_f64(2.0), Some(Ratio::new(2, 1)));
    }
}
