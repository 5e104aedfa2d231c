//! Scalar abstractions.
//!
//! [`Real`] is the floating point storage type (`f32` or `f64`). [`Scalar`] is
//! anything the residual and network code can be evaluated over: plain reals,
//! second-order jets ([`crate::autodiff::Jet2`]) and reverse-mode tape
//! variables ([`crate::autodiff::Var`]).

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumCast};

/// Floating point storage type.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + LinalgScalar
    + ScalarOperand
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; every `f64` is representable (possibly rounded).
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 literal converts to Real")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A differentiable scalar.
///
/// Only the operations the physics and network code needs are required. The
/// elementary functions are named like their `Float` counterparts; in code
/// where both traits are in scope call them through the trait path.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Real: Real;

    fn from_real(v: Self::Real) -> Self;

    /// Primal value with all derivative information dropped.
    fn value(&self) -> Self::Real;

    fn tanh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_real(<Self::Real as Real>::lit(v))
    }

    #[inline]
    fn zero() -> Self {
        Self::from_real(<Self::Real as num_traits::Zero>::zero())
    }

    /// Multiplication by a constant.
    #[inline]
    fn scale(self, k: Self::Real) -> Self {
        self * Self::from_real(k)
    }

    /// Addition of a constant.
    #[inline]
    fn shift(self, k: Self::Real) -> Self {
        self + Self::from_real(k)
    }
}

impl<T: Real> Scalar for T {
    type Real = T;

    #[inline]
    fn from_real(v: T) -> T {
        v
    }
    #[inline]
    fn value(&self) -> T {
        *self
    }
    #[inline]
    fn tanh(self) -> T {
        Float::tanh(self)
    }
    #[inline]
    fn sin(self) -> T {
        Float::sin(self)
    }
    #[inline]
    fn cos(self) -> T {
        Float::cos(self)
    }
    #[inline]
    fn exp(self) -> T {
        Float::exp(self)
    }
    #[inline]
    fn sqrt(self) -> T {
        Float::sqrt(self)
    }
    #[inline]
    fn scale(self, k: T) -> T {
        self * k
    }
    #[inline]
    fn shift(self, k: T) -> T {
        self + k
    }
}

/// A point in the plane.
pub type Point2<T> = [T; 2];
