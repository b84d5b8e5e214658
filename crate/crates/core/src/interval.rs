use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Open interval `(a, b)` with finite `a` and `b` finite or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Domain(format!("lower endpoint {a} must be finite")));
        }
        if b.is_nan() || b == T::neg_infinity() || !(a < b) {
            return Err(Error::Domain(format!("empty interval ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    /// Interval that may be degenerate (`a == b`); used for empty-range conventions.
    pub(crate) fn raw(a: T, b: T) -> Self {
        Self { a, b }
    }

    pub fn is_bounded(&self) -> bool {
        self.b.is_finite()
    }

    pub fn is_empty(&self) -> bool {
        !(self.a < self.b)
    }

    pub fn length(&self) -> T {
        self.b - self.a
    }

    pub fn contains(&self, other: &Interval<T>) -> bool {
        other.a >= self.a && other.b <= self.b
    }

    pub fn contains_point(&self, t: T) -> bool {
        t > self.a && t < self.b
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_infinite() {
            write!(f, "({},inf)", self.a)
        } else {
            write!(f, "({},{})", self.a, self.b)
        }
    }
}
