//! Closed-form weights, their definite integrals, essential suprema and the
//! `V_r` power-mean functional.

mod compiled;
mod dsl;
mod expr;

pub use compiled::Weight;
pub use dsl::{parse_weight, DslReader, Number};
pub use expr::{PieceExpr, TailSide, WeightExpr};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::interval::Interval;
use crate::scalar::{lit, Scalar};

/// Tolerances for the quadrature and sampling fallbacks.
#[derive(Clone, Copy, Debug)]
pub struct WeightTolerances<T> {
    pub integral: T,
    pub sup: T,
}

impl<T: Scalar> Default for WeightTolerances<T> {
    fn default() -> Self {
        Self { integral: lit(1e-10), sup: lit(1e-8) }
    }
}

/// `int_sub w(t)^e dt`.
///
/// Exact for single affine power factors; double-exponential quadrature
/// otherwise. Divergence is decided from endpoint exponents whenever the
/// weight has no norm-tail factor.
pub fn integrate<T: Scalar>(w: &Weight<T>, e: T, sub: Interval<T>) -> Result<ExtReal<T>> {
    integrate_with(w, e, sub, WeightTolerances::default())
}

pub fn integrate_with<T: Scalar>(
    w: &Weight<T>,
    e: T,
    sub: Interval<T>,
    tol: WeightTolerances<T>,
) -> Result<ExtReal<T>> {
    if sub.is_empty() {
        return Ok(ExtReal::zero());
    }
    w.check_covers(sub.a, sub.b)?;
    Ok(ExtReal::new(w.integral_tol(e, sub.a, sub.b, tol.integral)))
}

/// Essential supremum of `w` over `sub`; 0 on an empty range.
pub fn ess_sup<T: Scalar>(w: &Weight<T>, sub: Interval<T>) -> Result<ExtReal<T>> {
    if sub.is_empty() {
        return Ok(ExtReal::zero());
    }
    w.check_covers(sub.a, sub.b)?;
    Ok(ExtReal::new(w.extremum_raw(sub.a, sub.b, true, WeightTolerances::<T>::default().sup)))
}

/// Essential infimum of `w` over `sub`; 0 on an empty range.
pub fn ess_inf<T: Scalar>(w: &Weight<T>, sub: Interval<T>) -> Result<ExtReal<T>> {
    if sub.is_empty() {
        return Ok(ExtReal::zero());
    }
    w.check_covers(sub.a, sub.b)?;
    Ok(ExtReal::new(w.extremum_raw(sub.a, sub.b, false, WeightTolerances::<T>::default().sup)))
}

/// Checks `0 < r <= 1`.
pub fn check_r<T: Scalar>(r: T) -> Result<()> {
    if r > T::zero() && r <= T::one() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("r = {r} must lie in (0, 1]")))
    }
}

/// `V_r(x, t)`: `(int_x^t v^(1/(1-r)))^((1-r)/r)` for `r < 1`, `ess sup_(x,t) v` for `r = 1`.
pub fn v_r<T: Scalar>(v: &Weight<T>, r: T, x: T, t: T) -> Result<ExtReal<T>> {
    check_r(r)?;
    if x > t {
        return Err(Error::Domain(format!("V_r needs x <= t, got ({x}, {t})")));
    }
    if x == t {
        return Ok(ExtReal::zero());
    }
    v.check_covers(x, t)?;
    Ok(ExtReal::new(VrKernel::new(r).eval(v, x, t)))
}

/// Precomputed exponents for repeated `V_r` evaluations.
#[derive(Clone, Copy, Debug)]
pub(crate) struct VrKernel<T> {
    r: T,
    inner: T,
    outer: T,
    sup_tol: T,
}

impl<T: Scalar> VrKernel<T> {
    pub fn new(r: T) -> Self {
        let one = T::one();
        let (inner, outer) = if r < one { (one / (one - r), (one - r) / r) } else { (one, one) };
        Self { r, inner, outer, sup_tol: WeightTolerances::<T>::default().sup }
    }

    #[inline]
    pub fn eval(&self, v: &Weight<T>, x: T, t: T) -> T {
        if !(x < t) {
            return T::zero();
        }
        if self.r < T::one() {
            crate::scalar::pow0(v.integral_raw(self.inner, x, t), self.outer)
        } else {
            v.extremum_raw(x, t, true, self.sup_tol)
        }
    }

    /// `lim_{t -> x+} V_r(x, t)`: `v(x+)` when `r = 1`, otherwise 0.
    pub fn right_limit(&self, v: &Weight<T>, x: T) -> T {
        if self.r < T::one() {
            T::zero()
        } else {
            v.eval(x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn w(s: &str) -> Weight<f64> {
        Weight::compile(&parse_weight(s).unwrap()).unwrap()
    }

    fn iv(a: f64, b: f64) -> Interval<f64> {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn closed_form_integrals() {
        assert_relative_eq!(integrate(&w("pow:2"), 1.0, iv(1.0, 2.0)).unwrap().value(), 7.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(integrate(&w("pow:-2"), 1.0, iv(1.0, f64::INFINITY)).unwrap().value(), 1.0, max_relative = 1e-14);
        assert!(integrate(&w("pow:-1"), 1.0, iv(0.0, 1.0)).unwrap().is_infinite());
        assert!(integrate(&w("pow:-1"), 1.0, iv(1.0, f64::INFINITY)).unwrap().is_infinite());
        // exponent folds into the weight
        assert_relative_eq!(integrate(&w("pow:1"), 2.0, iv(0.0, 1.0)).unwrap().value(), 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn narrow_ranges_keep_precision() {
        let v = integrate(&w("pow:-1.5"), 1.0, iv(1.0, 1.0 + 1e-12)).unwrap().value();
        assert_relative_eq!(v, 1e-12, max_relative = 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(integrate(&w("pow:1"), 1.0, iv(-1.0, 1.0)), Err(Error::Domain(_))));
        assert!(matches!(integrate(&w("pw:[(0,1,pow:0)]"), 1.0, iv(0.5, 2.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn quadrature_fallbacks() {
        // int_0^1 t^-0.5 (1-t)^-0.5 = pi
        let beta = w("prod:pow:-0.5;refl:1:pow:-0.5");
        assert_relative_eq!(integrate(&beta, 1.0, iv(0.0, 1.0)).unwrap().value(), std::f64::consts::PI, max_relative = 1e-9);
        // strongly singular at the reflected root
        let near = w("refl:1:pow:-0.95");
        assert_relative_eq!(integrate(&near, 1.0, iv(0.0, 1.0)).unwrap().value(), 20.0, max_relative = 1e-12);
        let prod = w("prod:refl:2:pow:-0.99;pow:0.5");
        let v = integrate(&prod, 1.0, iv(1.0, 2.0)).unwrap().value();
        assert!(v > 90.0 && v.is_finite());
        // log factors decide divergence at infinity
        assert!(integrate(&w("powlog:-1,-1"), 1.0, iv(1.0, f64::INFINITY)).unwrap().is_infinite());
        let conv = integrate(&w("powlog:-1,-2"), 1.0, iv(0.0, f64::INFINITY)).unwrap().value();
        // int_0^inf dt / ((t) log(e+t)^2) diverges at 0; use (1,inf)
        assert!(conv.is_infinite());
        let conv = integrate(&w("powlog:-1,-2"), 1.0, iv(1.0, f64::INFINITY)).unwrap();
        assert!(conv.is_finite());
    }

    #[test]
    fn ess_sup_examples() {
        assert_relative_eq!(ess_sup(&w("pow:-1"), iv(2.0, 5.0)).unwrap().value(), 0.5);
        assert_eq!(ess_sup(&w("pow:0"), iv(0.0, 3.0)).unwrap().value(), 1.0);
        assert!(ess_sup(&w("pow:1"), iv(0.0, f64::INFINITY)).unwrap().is_infinite());
        let bump = w("prod:pow:1;refl:1:pow:2");
        assert_relative_eq!(ess_sup(&bump, iv(0.0, 1.0)).unwrap().value(), 4.0 / 27.0, max_relative = 1e-8);
        assert_relative_eq!(ess_inf(&w("pow:-1"), iv(2.0, 5.0)).unwrap().value(), 0.2);
        assert_eq!(ess_sup(&w("pow:1"), Interval::raw(1.0, 1.0)).unwrap().value(), 0.0);
    }

    #[test]
    fn v_r_examples() {
        assert_relative_eq!(v_r(&w("pow:0"), 0.5, 0.0, 1.0).unwrap().value(), 1.0);
        assert_relative_eq!(v_r(&w("pow:1"), 0.5, 0.0, 1.0).unwrap().value(), 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(v_r(&w("pow:1"), 1.0, 0.0, 1.0).unwrap().value(), 1.0);
        assert_eq!(v_r(&w("pow:1"), 0.5, 0.3, 0.3).unwrap().value(), 0.0);
        assert!(matches!(v_r(&w("pow:1"), 1.5, 0.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(v_r(&w("pow:1"), 0.0, 0.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn transforms_stay_in_family() {
        // reflection of t on (0,1)
        let r = w("refl:1:pow:1");
        assert_relative_eq!(r.eval(0.25), 0.75);
        // inversion with origin 0: t^-3 -> t^3
        let i = w("inv:0:pow:-3");
        assert_relative_eq!(i.eval(2.0), 8.0, max_relative = 1e-14);
        // inversion with origin 1: (1 + 1/(t-1))^2 = (t/(t-1))^2
        let i = w("inv:1:pow:2");
        assert_relative_eq!(i.eval(3.0), 2.25, max_relative = 1e-14);
        let err = Weight::compile(&parse_weight::<f64>("inv:0:powlog:1,1").unwrap()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedWeight(_)));
    }

    #[test]
    fn norm_tail_weight() {
        let t = w("tail:up:1:2:pow:0");
        assert_relative_eq!(t.eval(0.75), 0.5, max_relative = 1e-12);
        let t = w("tail:lo:0:1:pow:1");
        assert_relative_eq!(t.eval(2.0), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn f32_smoke() {
        let v = Weight::<f32>::compile(&WeightExpr::power(2.0)).unwrap();
        let i = integrate(&v, 1.0, Interval::new(1.0f32, 2.0).unwrap()).unwrap().value();
        assert!((i - 7.0 / 3.0).abs() < 1e-5);
    }
}
