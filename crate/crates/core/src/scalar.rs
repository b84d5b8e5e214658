use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the numerical core is written against.
///
/// Implemented for `f32` and `f64`. The ladders and graded meshes assume
/// roughly twelve decades of dynamic range, so `f64` is the practical choice
/// for anything beyond small smoke tests.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Product with the `0 * inf = 0` convention.
#[inline]
pub fn mul0<T: Scalar>(a: T, b: T) -> T {
    if a.is_zero() || b.is_zero() {
        T::zero()
    } else {
        a * b
    }
}

/// `x^e` for `x >= 0` with `0^e = inf` for negative `e` and `0^0 = 1`.
#[inline]
pub fn pow0<T: Scalar>(x: T, e: T) -> T {
    if e.is_zero() {
        T::one()
    } else if x.is_zero() {
        if e > T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else if x.is_infinite() {
        if e > T::zero() {
            T::infinity()
        } else {
            T::zero()
        }
    } else {
        x.powf(e)
    }
}
