//! Scalar traits for the linear algebra layer.
//!
//! Everything that checks an equation exactly is instantiated with
//! [`crate::Rational`]; the floating point impls exist for quick numeric
//! exploration and use a fixed absolute tolerance for pivot selection.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed};

/// A field usable by Gaussian elimination.
pub trait Field:
    Clone + fmt::Debug + fmt::Display + PartialEq + Num + Neg<Output = Self> + Send + Sync
{
    /// True when the value must be treated as zero during elimination.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_int(v: i64) -> Self;
}

impl Field for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

const F64_EPS: f64 = 1e-9;
const F32_EPS: f32 = 1e-5;

impl Field for f64 {
    fn is_negligible(&self) -> bool {
        self.abs() < F64_EPS
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Field for f32 {
    fn is_negligible(&self) -> bool {
        self.abs() < F32_EPS
    }

    fn from_int(v: i64) -> Self {
        v as f32
    }
}

/// A Euclidean ring of integers, used for Smith normal form.
pub trait IntegerRing:
    Clone + fmt::Debug + fmt::Display + PartialEq + Num + Signed + num_integer::Integer + Send + Sync
{
    fn from_int(v: i64) -> Self;
}

impl IntegerRing for BigInt {
    fn from_int(v: i64) -> Self {
        BigInt::from(v)
    }
}

impl IntegerRing for i64 {
    fn from_int(v: i64) -> Self {
        v
    }
}

impl IntegerRing for i128 {
    fn from_int(v: i64) -> Self {
        v as i128
    }
}
