use std::fmt;

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

/// Which end a norm tail integrates toward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailSide {
    /// `x -> (int_x^b u^p)^(1/p)`
    Upper,
    /// `x -> (int_a^x u^p)^(1/p)`
    Lower,
}

/// Closed-form weight expression.
///
/// The first six variants are the user-facing family; `Reflect`, `Shift` and
/// `Invert` are produced by change-of-variable transforms, and `NormTail` by
/// the `p = q` Lebesgue reduction when the tail norm has no monomial form.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightExpr<T> {
    /// `t^alpha`
    Power { alpha: T },
    /// `t^alpha * log(e + t)^beta`
    PowerLog { alpha: T, beta: T },
    Piecewise(Vec<PieceExpr<T>>),
    Product(Box<WeightExpr<T>>, Box<WeightExpr<T>>),
    Scaled { c: T, inner: Box<WeightExpr<T>> },
    PowerOf { inner: Box<WeightExpr<T>>, e: T },
    /// `inner(center - t)`
    Reflect { center: T, inner: Box<WeightExpr<T>> },
    /// `inner(t - by)`
    Shift { by: T, inner: Box<WeightExpr<T>> },
    /// `inner(origin + 1/(t - origin))`
    Invert { origin: T, inner: Box<WeightExpr<T>> },
    NormTail { u: Box<WeightExpr<T>>, p: T, side: TailSide, endpoint: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PieceExpr<T> {
    pub lo: T,
    pub hi: T,
    pub expr: WeightExpr<T>,
}

impl<T: Scalar> WeightExpr<T> {
    pub fn one() -> Self {
        WeightExpr::Power { alpha: T::zero() }
    }

    pub fn power(alpha: T) -> Self {
        WeightExpr::Power { alpha }
    }

    pub fn power_log(alpha: T, beta: T) -> Self {
        WeightExpr::PowerLog { alpha, beta }
    }

    pub fn scaled(self, c: T) -> Self {
        WeightExpr::Scaled { c, inner: Box::new(self) }
    }

    pub fn times(self, other: Self) -> Self {
        WeightExpr::Product(Box::new(self), Box::new(other))
    }

    pub fn pow(self, e: T) -> Self {
        WeightExpr::PowerOf { inner: Box::new(self), e }
    }

    pub fn reflect(self, center: T) -> Self {
        WeightExpr::Reflect { center, inner: Box::new(self) }
    }

    pub fn shift(self, by: T) -> Self {
        WeightExpr::Shift { by, inner: Box::new(self) }
    }

    pub fn invert(self, origin: T) -> Self {
        WeightExpr::Invert { origin, inner: Box::new(self) }
    }

    /// True for `Power{0}` (possibly wrapped in identity-like nodes).
    pub fn is_unit(&self) -> bool {
        match self {
            WeightExpr::Power { alpha } => alpha.is_zero(),
            WeightExpr::PowerLog { alpha, beta } => alpha.is_zero() && beta.is_zero(),
            WeightExpr::Scaled { c, inner } => *c == T::one() && inner.is_unit(),
            WeightExpr::PowerOf { inner, .. } => inner.is_unit(),
            WeightExpr::Product(l, r) => l.is_unit() && r.is_unit(),
            WeightExpr::Reflect { inner, .. }
            | WeightExpr::Shift { inner, .. }
            | WeightExpr::Invert { inner, .. } => inner.is_unit(),
            _ => false,
        }
    }
}

pub(crate) fn fmt_num<T: Scalar>(f: &mut fmt::Formatter<'_>, x: T) -> fmt::Result {
    if x.is_infinite() {
        if x > T::zero() {
            write!(f, "inf")
        } else {
            write!(f, "-inf")
        }
    } else {
        write!(f, "{x}")
    }
}

/// Prints the weight DSL; `parse_weight` reads it back.
impl<T: Scalar> fmt::Display for WeightExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightExpr::Power { alpha } => {
                write!(f, "pow:")?;
                fmt_num(f, *alpha)
            }
            WeightExpr::PowerLog { alpha, beta } => {
                write!(f, "powlog:")?;
                fmt_num(f, *alpha)?;
                write!(f, ",")?;
                fmt_num(f, *beta)
            }
            WeightExpr::Piecewise(pieces) => {
                write!(f, "pw:[")?;
                for (i, p) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "(")?;
                    fmt_num(f, p.lo)?;
                    write!(f, ",")?;
                    fmt_num(f, p.hi)?;
                    write!(f, ",{})", p.expr)?;
                }
                write!(f, "]")
            }
            WeightExpr::Product(l, r) => write!(f, "prod:{l};{r}"),
            WeightExpr::Scaled { c, inner } => {
                write!(f, "scale:")?;
                fmt_num(f, *c)?;
                write!(f, "*{inner}")
            }
            WeightExpr::PowerOf { inner, e } => {
                write!(f, "powof:{inner}^")?;
                fmt_num(f, *e)
            }
            WeightExpr::Reflect { center, inner } => {
                write!(f, "refl:")?;
                fmt_num(f, *center)?;
                write!(f, ":{inner}")
            }
            WeightExpr::Shift { by, inner } => {
                write!(f, "shift:")?;
                fmt_num(f, *by)?;
                write!(f, ":{inner}")
            }
            WeightExpr::Invert { origin, inner } => {
                write!(f, "inv:")?;
                fmt_num(f, *origin)?;
                write!(f, ":{inner}")
            }
            WeightExpr::NormTail { u, p, side, endpoint } => {
                let s = match side {
                    TailSide::Upper => "up",
                    TailSide::Lower => "lo",
                };
                write!(f, "tail:{s}:")?;
                fmt_num(f, *endpoint)?;
                write!(f, ":")?;
                fmt_num(f, *p)?;
                write!(f, ":{u}")
            }
        }
    }
}

impl<T: Scalar> Serialize for WeightExpr<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
