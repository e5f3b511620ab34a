//! Scalar abstractions shared by the numerical kernels.
//!
//! Floating-point kernels (compensated sums, Vaaler polynomials, cup Fourier
//! data) are written against [`Real`]. Piecewise-polynomial evaluation only
//! needs field operations and a floor, captured by [`Field`], which is also
//! implemented for exact rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// floating point: f32 or f64
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// An ordered field with an integer floor.
pub trait Field: Clone + Debug + PartialOrd + Num {
    fn from_i64(x: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn floor_i64(&self) -> i64;
    fn as_f64(&self) -> f64;
}

impl Field for f64 {
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Field for f32 {
    fn from_i64(x: i64) -> Self {
        x as f32
    }
    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Field for BigRational {
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor fits in i64")
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
