//! Reverse-mode differentiation on a Wengert list.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Float;

use crate::scalar::{Real, Scalar};

#[derive(Clone, Copy)]
struct Node<T> {
    parents: [(usize, T); 2],
    arity: u8,
}

/// Records every operation on [`Var`]s created from it.
pub struct Tape<T: Real> {
    nodes: RefCell<Vec<Node<T>>>,
}

impl<T: Real> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Self {
            nodes: RefCell::new(Vec::with_capacity(1024)),
        }
    }

    /// A fresh independent variable.
    pub fn var(&self, value: T) -> Var<'_, T> {
        let idx = self.push(Node {
            parents: [(0, T::zero()); 2],
            arity: 0,
        });
        Var {
            value,
            slot: Some((self, idx)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops all recorded nodes. Existing variables become invalid.
    pub fn clear(&mut self) {
        self.nodes.get_mut().clear();
    }

    fn push(&self, node: Node<T>) -> usize {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(node);
        nodes.len() - 1
    }

    /// Adjoints of every node with respect to `output`.
    ///
    /// Index the result with [`Var::index`]. A constant output yields all zeros.
    pub fn gradient(&self, output: &Var<'_, T>) -> Vec<T> {
        let nodes = self.nodes.borrow();
        let mut adj = vec![T::zero(); nodes.len()];
        let Some((_, out)) = output.slot else {
            return adj;
        };
        adj[out] = T::one();
        for i in (0..=out).rev() {
            let a = adj[i];
            if a == T::zero() {
                continue;
            }
            let node = nodes[i];
            for &(p, d) in &node.parents[..node.arity as usize] {
                adj[p] += a * d;
            }
        }
        adj
    }
}

/// A scalar whose derivatives are tracked on a [`Tape`].
///
/// Constants (created through [`Scalar::from_real`]) carry no slot and cost
/// nothing to record.
#[derive(Clone, Copy)]
pub struct Var<'t, T: Real> {
    value: T,
    slot: Option<(&'t Tape<T>, usize)>,
}

impl<T: Real> fmt::Debug for Var<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slot {
            Some((_, i)) => write!(f, "Var({:?} @ {})", self.value, i),
            None => write!(f, "Var({:?})", self.value),
        }
    }
}

impl<'t, T: Real> Var<'t, T> {
    pub fn constant(value: T) -> Self {
        Self { value, slot: None }
    }

    /// Tape index, `None` for constants.
    pub fn index(&self) -> Option<usize> {
        self.slot.map(|(_, i)| i)
    }

    fn unary(self, value: T, d: T) -> Self {
        match self.slot {
            None => Self::constant(value),
            Some((tape, i)) => {
                let idx = tape.push(Node {
                    parents: [(i, d), (0, T::zero())],
                    arity: 1,
                });
                Self {
                    value,
                    slot: Some((tape, idx)),
                }
            }
        }
    }

    fn binary(self, other: Self, value: T, da: T, db: T) -> Self {
        match (self.slot, other.slot) {
            (None, None) => Self::constant(value),
            (Some(_), None) => self.unary(value, da),
            (None, Some(_)) => other.unary(value, db),
            (Some((tape, i)), Some((_, j))) => {
                let idx = tape.push(Node {
                    parents: [(i, da), (j, db)],
                    arity: 2,
                });
                Self {
                    value,
                    slot: Some((tape, idx)),
                }
            }
        }
    }
}

impl<T: Real> Add for Var<'_, T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.binary(o, self.value + o.value, T::one(), T::one())
    }
}

impl<T: Real> Sub for Var<'_, T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.binary(o, self.value - o.value, T::one(), -T::one())
    }
}

impl<T: Real> Mul for Var<'_, T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.binary(o, self.value * o.value, o.value, self.value)
    }
}

impl<T: Real> Div for Var<'_, T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        self.binary(o, q, T::one() / o.value, -q / o.value)
    }
}

impl<T: Real> Neg for Var<'_, T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.unary(-self.value, -T::one())
    }
}

impl<T: Real> Scalar for Var<'_, T> {
    type Real = T;

    fn from_real(v: T) -> Self {
        Self::constant(v)
    }

    fn value(&self) -> T {
        self.value
    }

    fn tanh(self) -> Self {
        let t = Float::tanh(self.value);
        self.unary(t, T::one() - t * t)
    }

    fn sin(self) -> Self {
        self.unary(Float::sin(self.value), Float::cos(self.value))
    }

    fn cos(self) -> Self {
        self.unary(Float::cos(self.value), -Float::sin(self.value))
    }

    fn exp(self) -> Self {
        let e = Float::exp(self.value);
        self.unary(e, e)
    }

    fn sqrt(self) -> Self {
        let r = Float::sqrt(self.value);
        self.unary(r, T::lit(0.5) / r)
    }

    fn scale(self, k: T) -> Self {
        self.unary(self.value * k, k)
    }

    fn shift(self, k: T) -> Self {
        self.unary(self.value + k, T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let tape = Tape::<f64>::new();
        let x = tape.var(3.0);
        let y = tape.var(2.0);
        let f = x * y + x / y;
        let g = tape.gradient(&f);
        assert_eq!(g[x.index().unwrap()], 2.0 + 0.5);
        assert_eq!(g[y.index().unwrap()], 3.0 - 3.0 / 4.0);
    }

    #[test]
    fn constants_are_not_recorded() {
        let tape = Tape::<f64>::new();
        let c = Var::constant(2.0) * Var::constant(4.0);
        assert_eq!(c.value, 8.0);
        assert!(tape.is_empty());
        assert!(tape.gradient(&c).is_empty());
    }

    #[test]
    fn tanh_derivative() {
        let tape = Tape::<f64>::new();
        let x = tape.var(0.3);
        let g = tape.gradient(&Scalar::tanh(x));
        let t = 0.3f64.tanh();
        assert!((g[0] - (1.0 - t * t)).abs() < 1e-15);
    }
}
