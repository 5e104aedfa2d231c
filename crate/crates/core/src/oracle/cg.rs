//! Sparse symmetric systems and Jacobi-preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Compressed sparse rows, assembled row by row.
#[derive(Clone, Debug, Default)]
pub struct Csr<T> {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> Csr<T> {
    pub fn new() -> Self {
        Self {
            row_ptr: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Appends the next row; duplicate columns are summed on use.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, T)>) {
        for (c, v) in entries {
            self.cols.push(c);
            self.vals.push(v);
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn mul(&self, x: &[T], y: &mut [T]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .filter(|&k| self.cols[k] == r)
                    .fold(T::zero(), |a, k| a + self.vals[k])
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgReport<T> {
    pub iterations: usize,
    /// `‖b − A x‖ / ‖b‖` at exit.
    pub relative_residual: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

/// Solves `A x = b` for symmetric positive definite `A` to a relative
/// residual of `tol`.
pub fn conjugate_gradient<T: Real>(a: &Csr<T>, b: &[T], tol: T, max_iter: usize) -> Result<(Vec<T>, CgReport<T>)> {
    let n = a.rows();
    let inv_diag: Vec<T> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
        .collect();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![T::zero(); n];
    if b_norm == T::zero() {
        return Ok((x, CgReport { iterations: 0, relative_residual: T::zero() }));
    }
    let mut r = b.to_vec();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(r, d)| *r * *d).collect();
    let mut p = z.clone();
    let mut ap = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if it % 50 == 0 {
            // refresh the recursive residual to stop drift
            a.mul(&x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
        }
        let rel = dot(&r, &r).sqrt() / b_norm;
        if !rel.is_finite() {
            return Err(Error::Numerical {
                message: "conjugate gradients broke down".into(),
                residual: rel.to_f64_lossy(),
            });
        }
        if rel <= tol {
            return Ok((x, CgReport { iterations: it, relative_residual: rel }));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let mut res = vec![T::zero(); n];
    a.mul(&x, &mut res);
    let rel = res.iter().zip(b).fold(T::zero(), |s, (ax, b)| s + (*b - *ax) * (*b - *ax)).sqrt() / b_norm;
    Err(Error::Numerical {
        message: format!("conjugate gradients did not converge in {max_iter} iterations"),
        residual: rel.to_f64_lossy(),
    })
}
