use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

/// A nonnegative extended real: a finite value `>= 0` or `+inf`.
///
/// Arithmetic uses the conventions `1/inf = 0`, `0/0 = 0` and `0*inf = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ExtReal<T>(T);

impl<T: Scalar> ExtReal<T> {
    pub fn new(value: T) -> Self {
        debug_assert!(!value.is_nan(), "ExtReal from NaN");
        if value.is_nan() || value < T::zero() {
            Self(T::zero())
        } else {
            Self(value)
        }
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn infinity() -> Self {
        Self(T::infinity())
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    /// `self^e`, with `0^e = inf` for `e < 0` and `inf^e = 0` for `e < 0`.
    pub fn powf(self, e: T) -> Self {
        Self(crate::scalar::pow0(self.0, e))
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    /// Relative distance `|a-b| / max(|a|,|b|)`; infinite values only match each other.
    pub fn rel_diff(self, other: Self) -> T {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => T::zero(),
            (false, false) => {
                let m = self.0.max(other.0);
                if m.is_zero() {
                    T::zero()
                } else {
                    (self.0 - other.0).abs() / m
                }
            }
            _ => T::infinity(),
        }
    }
}

impl<T: Scalar> From<T> for ExtReal<T> {
    fn from(value: T) -> Self {
        Self::new(value)
    }
}

impl<T: Scalar> Add for ExtReal<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl<T: Scalar> Mul for ExtReal<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(crate::scalar::mul0(self.0, rhs.0))
    }
}

impl<T: Scalar> Div for ExtReal<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.0.is_zero() {
            return Self(T::zero());
        }
        if rhs.0.is_infinite() {
            if self.0.is_infinite() {
                // inf/inf has no convention; callers must not rely on it.
                return Self(T::infinity());
            }
            return Self(T::zero());
        }
        if rhs.0.is_zero() {
            return Self(T::infinity());
        }
        Self(self.0 / rhs.0)
    }
}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<T: Scalar> Serialize for ExtReal<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0.to_f64().unwrap_or(f64::NAN))
        }
    }
}
