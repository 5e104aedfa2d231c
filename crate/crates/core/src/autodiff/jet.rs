//! Second-order forward-mode jets over the two spatial coordinates.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{Real, Scalar};

/// Value, gradient and Hessian of a scalar field at a point.
///
/// `grad[i]` is the partial derivative with respect to coordinate `i`
/// (0 = x, 1 = y) and `hess[i][j]` the mixed second partial. The Hessian is
/// kept as a full 2×2 array; every operation writes it symmetrically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<S> {
    pub value: S,
    pub grad: [S; 2],
    pub hess: [[S; 2]; 2],
}

impl<S: Scalar> Jet2<S> {
    pub fn constant(value: S) -> Self {
        let z = S::zero();
        Self {
            value,
            grad: [z, z],
            hess: [[z, z], [z, z]],
        }
    }

    /// The coordinate function `x_axis` seeded at `value`.
    pub fn variable(value: S, axis: usize) -> Self {
        let mut j = Self::constant(value);
        j.grad[axis] = S::lit(1.0);
        j
    }

    /// Both coordinate jets for a point.
    pub fn seed(point: [S; 2]) -> [Self; 2] {
        [Self::variable(point[0], 0), Self::variable(point[1], 1)]
    }

    /// Applies a scalar function given its value and first two derivatives at
    /// `self.value`.
    #[inline]
    pub fn chain(&self, f: S, df: S, d2f: S) -> Self {
        let g = self.grad;
        let h = self.hess;
        let hxy = d2f * g[0] * g[1] + df * h[0][1];
        Self {
            value: f,
            grad: [df * g[0], df * g[1]],
            hess: [
                [d2f * g[0] * g[0] + df * h[0][0], hxy],
                [hxy, d2f * g[1] * g[1] + df * h[1][1]],
            ],
        }
    }

    /// Laplacian `∂xx + ∂yy`.
    pub fn laplacian(&self) -> S {
        self.hess[0][0] + self.hess[1][1]
    }

    pub fn map<Q>(&self, f: impl Fn(S) -> Q) -> Jet2<Q> {
        Jet2 {
            value: f(self.value),
            grad: [f(self.grad[0]), f(self.grad[1])],
            hess: [
                [f(self.hess[0][0]), f(self.hess[0][1])],
                [f(self.hess[1][0]), f(self.hess[1][1])],
            ],
        }
    }

    /// Flattened channels in the order value, ∂x, ∂y, ∂xx, ∂xy, ∂yy.
    pub fn channels(&self) -> [S; 6] {
        [
            self.value,
            self.grad[0],
            self.grad[1],
            self.hess[0][0],
            self.hess[0][1],
            self.hess[1][1],
        ]
    }

    pub fn from_channels(c: [S; 6]) -> Self {
        Self {
            value: c[0],
            grad: [c[1], c[2]],
            hess: [[c[3], c[4]], [c[4], c[5]]],
        }
    }
}

impl<T: Real> Jet2<T> {
    pub fn is_finite(&self) -> bool {
        self.channels().iter().all(|v| v.is_finite())
    }
}

impl<S: Scalar> Add for Jet2<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            grad: [self.grad[0] + o.grad[0], self.grad[1] + o.grad[1]],
            hess: [
                [self.hess[0][0] + o.hess[0][0], self.hess[0][1] + o.hess[0][1]],
                [self.hess[1][0] + o.hess[1][0], self.hess[1][1] + o.hess[1][1]],
            ],
        }
    }
}

impl<S: Scalar> Sub for Jet2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<S: Scalar> Neg for Jet2<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl<S: Scalar> Mul for Jet2<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        let cross = |i: usize, j: usize| a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j];
        let hxy = a.value * b.hess[0][1] + b.value * a.hess[0][1] + cross(0, 1);
        Self {
            value: a.value * b.value,
            grad: [
                a.value * b.grad[0] + b.value * a.grad[0],
                a.value * b.grad[1] + b.value * a.grad[1],
            ],
            hess: [
                [a.value * b.hess[0][0] + b.value * a.hess[0][0] + cross(0, 0), hxy],
                [hxy, a.value * b.hess[1][1] + b.value * a.hess[1][1] + cross(1, 1)],
            ],
        }
    }
}

impl<S: Scalar> Div for Jet2<S> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = S::lit(1.0) / o.value;
        let recip = o.chain(inv, -(inv * inv), S::lit(2.0) * inv * inv * inv);
        self * recip
    }
}

impl<S: Scalar> Scalar for Jet2<S> {
    type Real = S::Real;

    #[inline]
    fn from_real(v: S::Real) -> Self {
        Self::constant(S::from_real(v))
    }

    #[inline]
    fn value(&self) -> S::Real {
        self.value.value()
    }

    fn tanh(self) -> Self {
        let t = self.value.tanh();
        let d1 = S::lit(1.0) - t * t;
        self.chain(t, d1, S::lit(-2.0) * t * d1)
    }

    fn sin(self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.chain(c, -s, -c)
    }

    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        let d1 = S::lit(0.5) / r;
        let d2 = S::lit(-0.25) / (r * r * r);
        self.chain(r, d1, d2)
    }

    #[inline]
    fn scale(self, k: S::Real) -> Self {
        self.map(|v| v.scale(k))
    }

    #[inline]
    fn shift(mut self, k: S::Real) -> Self {
        self.value = self.value.shift(k);
        self
    }
}
