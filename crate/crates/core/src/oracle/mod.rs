//! Reference solutions: closed-form patch tests and finite-difference
//! solvers for the flow and diffusion problems.

mod cg;
mod diffusion_fd;
mod flow_fd;

use std::path::Path;

use crate::error::{Error, Result};
use crate::physics::PatchTest;
use crate::scalar::{Point2, Real};

pub use cg::{conjugate_gradient, CgReport, Csr};
pub use diffusion_fd::{solve_diffusion_fd, DiffusionDomain, DiffusionProblem};
pub use flow_fd::{solve_flow_fd, FlowSolution};

/// Values on a uniform `nx × ny` grid, row-major with x fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid<T> {
    pub nx: usize,
    pub ny: usize,
    /// Coordinates of node `(0, 0)`.
    pub origin: Point2<T>,
    pub spacing: [T; 2],
    pub values: Vec<T>,
}

impl<T: Real> FieldGrid<T> {
    pub fn new(nx: usize, ny: usize, origin: Point2<T>, spacing: [T; 2], values: Vec<T>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(Error::config(format!(
                "grid {nx}x{ny} needs {} values, got {}",
                nx * ny,
                values.len()
            )));
        }
        Ok(Self {
            nx,
            ny,
            origin,
            spacing,
            values,
        })
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[j * self.nx + i]
    }

    pub fn point(&self, i: usize, j: usize) -> Point2<T> {
        [
            self.origin[0] + T::lit(i as f64) * self.spacing[0],
            self.origin[1] + T::lit(j as f64) * self.spacing[1],
        ]
    }

    /// Points and values of row `j`.
    pub fn row(&self, j: usize) -> Vec<(Point2<T>, T)> {
        (0..self.nx).map(|i| (self.point(i, j), self.at(i, j))).collect()
    }

    pub fn points(&self) -> Vec<Point2<T>> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| (i, j)))
            .map(|(i, j)| self.point(i, j))
            .collect()
    }

    /// Bilinear interpolation, clamped to the node hull.
    pub fn bilinear(&self, x: Point2<T>) -> T {
        let locate = |k: usize, n: usize| {
            let t = ((x[k] - self.origin[k]) / self.spacing[k]).max(T::zero());
            let i = t.floor().to_f64_lossy() as usize;
            if n < 2 {
                (0, 0, T::zero())
            } else if i >= n - 1 {
                (n - 2, n - 1, T::one())
            } else {
                (i, i + 1, t - T::lit(i as f64))
            }
        };
        let (i0, i1, tx) = locate(0, self.nx);
        let (j0, j1, ty) = locate(1, self.ny);
        let lerp = |a: T, b: T, t: T| a + (b - a) * t;
        lerp(
            lerp(self.at(i0, j0), self.at(i1, j0), tx),
            lerp(self.at(i0, j1), self.at(i1, j1), tx),
            ty,
        )
    }

    /// Smallest finite value, ignoring NaN placeholders.
    pub fn min(&self) -> T {
        self.values.iter().copied().filter(|v| !v.is_nan()).fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().filter(|v| !v.is_nan()).fold(T::neg_infinity(), T::max)
    }

    /// `x,y,value` rows in grid order; nodes outside the domain (NaN) are
    /// skipped.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let (pts, vals): (Vec<Point2<T>>, Vec<T>) = self
            .points()
            .into_iter()
            .zip(self.values.iter().copied())
            .filter(|(_, v)| !v.is_nan())
            .unzip();
        crate::io::export_field(&pts, &vals, path)
    }
}

/// Pressure and velocity of the vertical and horizontal patch tests with
/// `p = 1` on the left, `p = 0` on the right, no flow through top and bottom
/// and unit viscosity.
pub fn analytic_patch<T: Real>(test: PatchTest, k1: T, k2: T, x: Point2<T>) -> Result<(T, [T; 2])> {
    if !(k1 > T::zero() && k2 > T::zero()) {
        return Err(Error::Medium("permeabilities must be positive".into()));
    }
    let half = T::lit(0.5);
    match test {
        PatchTest::Vertical => {
            // two resistances of length 1/2 in series
            let v = T::lit(2.0) * k1 * k2 / (k1 + k2);
            let p_mid = k1 / (k1 + k2);
            let p = if x[0] < half {
                T::one() - v * x[0] / k1
            } else {
                p_mid - v * (x[0] - half) / k2
            };
            Ok((p, [v, T::zero()]))
        }
        PatchTest::Horizontal => {
            let k = if x[1] < half { k1 } else { k2 };
            Ok((T::one() - x[0], [k, T::zero()]))
        }
        PatchTest::Inclined => Err(Error::NoClosedForm(
            "the inclined patch test has no closed-form solution; use the finite-difference oracle".into(),
        )),
    }
}
