//! Vertex-centred finite differences for `−div(D ∇c) = f` with constant `D`
//! and Dirichlet data on every boundary.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::physics::{ScalarField, SymTensor2};
use crate::scalar::{Point2, Real};

use super::{conjugate_gradient, Csr, FieldGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiffusionDomain<T> {
    UnitSquare,
    /// Unit square minus a centred square hole of this side.
    SquareWithHole(T),
}

#[derive(Clone)]
pub struct DiffusionProblem<T> {
    pub domain: DiffusionDomain<T>,
    pub d: SymTensor2<T>,
    /// Nodes per side; spacing is `1/(n − 1)`.
    pub n: usize,
    /// Boundary values on the outer square and the hole perimeter.
    pub dirichlet: ScalarField<T>,
    pub source: ScalarField<T>,
}

impl<T: Real> DiffusionProblem<T> {
    /// `c = inner` on the hole perimeter, `c = outer` on the outer square,
    /// no source.
    pub fn hole(d: SymTensor2<T>, n: usize, side: T, inner: T, outer: T) -> Self {
        let lo = (T::one() - side) * T::lit(0.5);
        let hi = T::one() - lo;
        let tol = T::lit(1e-9);
        Self {
            domain: DiffusionDomain::SquareWithHole(side),
            d,
            n,
            dirichlet: Arc::new(move |p: Point2<T>| {
                let on_hole = p.iter().all(|&c| c >= lo - tol && c <= hi + tol);
                if on_hole {
                    inner
                } else {
                    outer
                }
            }),
            source: Arc::new(|_| T::zero()),
        }
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for DiffusionProblem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffusionProblem")
            .field("domain", &self.domain)
            .field("d", &self.d)
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Node {
    Unknown(usize),
    Fixed,
    Outside,
}

/// Weights `(di, dj, w)` of `h² · (−div(D ∇c))` at a node, mixed derivative
/// by the four-corner central difference.
fn stencil<T: Real>(d: &SymTensor2<T>) -> [(isize, isize, T); 9] {
    let two = T::lit(2.0);
    let q = d.xy / two;
    [
        (0, 0, two * d.xx + two * d.yy),
        (-1, 0, -d.xx),
        (1, 0, -d.xx),
        (0, -1, -d.yy),
        (0, 1, -d.yy),
        (1, 1, -q),
        (-1, -1, -q),
        (-1, 1, q),
        (1, -1, q),
    ]
}

/// Solves on the vertex grid and returns nodal values, NaN inside the hole.
/// The hole edges must fall on grid lines.
pub fn solve_diffusion_fd<T: Real>(problem: &DiffusionProblem<T>) -> Result<FieldGrid<T>> {
    let n = problem.n;
    if n < 3 {
        return Err(Error::config(format!("diffusion oracle needs n >= 3, got {n}")));
    }
    let d = problem.d;
    if !(d.is_finite() && d.xx > T::zero() && d.det() > T::zero()) {
        return Err(Error::config(format!("diffusion tensor {d:?} is not SPD")));
    }
    let h = T::one() / T::lit((n - 1) as f64);
    let coord = |i: usize| T::lit(i as f64) * h;

    // hole as an index range [lo, hi] of perimeter lines
    let hole = match problem.domain {
        DiffusionDomain::UnitSquare => None,
        DiffusionDomain::SquareWithHole(side) => {
            if !(side > T::zero() && side < T::one()) {
                return Err(Error::config("hole side must lie in (0, 1)"));
            }
            let lo = (T::one() - side) * T::lit(0.5) / h;
            let k = lo.round();
            if (lo - k).abs() > T::lit(1e-9) {
                return Err(Error::config(format!("hole edges are not on the {n}-node grid")));
            }
            let k = k.to_f64_lossy() as usize;
            Some((k, n - 1 - k))
        }
    };

    let mut nodes = vec![Node::Fixed; n * n];
    let mut unknowns = 0;
    for j in 0..n {
        for i in 0..n {
            let outer = i == 0 || j == 0 || i == n - 1 || j == n - 1;
            let kind = match hole {
                Some((lo, hi)) if (lo < i && i < hi) && (lo < j && j < hi) => Node::Outside,
                Some((lo, hi)) if (lo..=hi).contains(&i) && (lo..=hi).contains(&j) => Node::Fixed,
                _ if outer => Node::Fixed,
                _ => {
                    unknowns += 1;
                    Node::Unknown(unknowns - 1)
                }
            };
            nodes[j * n + i] = kind;
        }
    }

    let w = stencil(&d);
    let h2 = h * h;
    let mut a = Csr::new();
    let mut b = Vec::with_capacity(unknowns);
    for j in 0..n {
        for i in 0..n {
            let Node::Unknown(_) = nodes[j * n + i] else { continue };
            let mut rhs = (problem.source)([coord(i), coord(j)]) * h2;
            let mut row = Vec::with_capacity(9);
            for &(di, dj, wk) in &w {
                if wk == T::zero() {
                    continue;
                }
                let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                match nodes[jj * n + ii] {
                    Node::Unknown(col) => row.push((col, wk)),
                    Node::Fixed => rhs -= wk * (problem.dirichlet)([coord(ii), coord(jj)]),
                    // corner neighbours across the hole are perimeter nodes
                    Node::Outside => unreachable!("interior node next to the hole interior"),
                }
            }
            a.push_row(row);
            b.push(rhs);
        }
    }

    let (x, _) = conjugate_gradient(&a, &b, T::lit(1e-10), 20 * n * n)?;
    let values = nodes
        .iter()
        .enumerate()
        .map(|(k, node)| match *node {
            Node::Unknown(col) => x[col],
            Node::Fixed => (problem.dirichlet)([coord(k % n), coord(k / n)]),
            Node::Outside => T::nan(),
        })
        .collect();
    FieldGrid::new(n, n, [T::zero(), T::zero()], [h, h], values)
}
