//! Batched jet propagation with reverse-mode parameter gradients.
//!
//! A batch of `n` points is laid out as a matrix with one column per
//! (channel, point) pair, channel-major: columns `c*n .. (c+1)*n` hold channel
//! `c` for every point. Channels are value, ∂x, ∂y, ∂xx, ∂xy, ∂yy, truncated
//! to the requested [`Order`]. Each affine layer is then a single GEMM and the
//! bias only touches the value block.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, ArrayView2, ArrayViewMut2, Axis};

use super::{NetworkParams, ParamGradient};
use crate::scalar::{Point2, Real};

/// Highest spatial derivative propagated through a batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Value,
    Gradient,
    Hessian,
}

impl Order {
    pub const fn channels(self) -> usize {
        match self {
            Order::Value => 1,
            Order::Gradient => 3,
            Order::Hessian => 6,
        }
    }

    /// Smallest order that carries `channel`.
    pub const fn for_channel(channel: usize) -> Order {
        match channel {
            0 => Order::Value,
            1 | 2 => Order::Gradient,
            _ => Order::Hessian,
        }
    }
}

/// Channel indices in the batched layout.
pub mod channel {
    pub const VALUE: usize = 0;
    pub const DX: usize = 1;
    pub const DY: usize = 2;
    pub const DXX: usize = 3;
    pub const DXY: usize = 4;
    pub const DYY: usize = 5;
}

/// Reusable buffers for forward and backward passes.
#[derive(Debug, Default)]
pub struct BatchEngine<T> {
    n: usize,
    order: Option<Order>,
    /// `inputs[l]` feeds affine layer `l`; `inputs[0]` are the coordinate jets.
    inputs: Vec<Array2<T>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Array2<T>>,
    output: Array2<T>,
    grad_in: Array2<T>,
    grad_pre: Array2<T>,
}

fn resize<T: Real>(buf: &mut Array2<T>, rows: usize, cols: usize) {
    if buf.dim() != (rows, cols) {
        *buf = Array2::zeros((rows, cols));
    }
}

impl<T: Real> BatchEngine<T> {
    pub fn new() -> Self {
        Self {
            n: 0,
            order: None,
            inputs: Vec::new(),
            pre: Vec::new(),
            output: Array2::zeros((0, 0)),
            grad_in: Array2::zeros((0, 0)),
            grad_pre: Array2::zeros((0, 0)),
        }
    }

    /// Number of points in the last forward pass.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Network outputs of the last forward pass, `k × channels·n`.
    pub fn output(&self) -> ArrayView2<'_, T> {
        self.output.view()
    }

    /// Output `out`, channel `ch` at point `i` of the last forward pass.
    #[inline]
    pub fn get(&self, out: usize, ch: usize, i: usize) -> T {
        self.output[[out, ch * self.n + i]]
    }

    /// Propagates jets of the given order for all `points`.
    pub fn forward(&mut self, params: &NetworkParams<T>, points: &[Point2<T>], order: Order) {
        let n = points.len();
        let ch = order.channels();
        let cols = ch * n;
        let depth = params.depth();
        self.n = n;
        self.order = Some(order);
        self.inputs.resize_with(depth, || Array2::zeros((0, 0)));
        self.pre.resize_with(depth - 1, || Array2::zeros((0, 0)));

        let x0 = &mut self.inputs[0];
        resize(x0, 2, cols);
        x0.fill(T::zero());
        for (i, p) in points.iter().enumerate() {
            x0[[0, i]] = p[0];
            x0[[1, i]] = p[1];
        }
        if ch >= 3 {
            for i in 0..n {
                x0[[0, n + i]] = T::one();
                x0[[1, 2 * n + i]] = T::one();
            }
        }

        for l in 0..depth {
            let w = &params.weights[l];
            let b = &params.biases[l];
            let rows = w.nrows();
            let (before, after) = self.inputs.split_at_mut(l + 1);
            let input = &before[l];
            let target = if l + 1 < depth {
                &mut self.pre[l]
            } else {
                &mut self.output
            };
            resize(target, rows, cols);
            general_mat_mul(T::one(), w, input, T::zero(), target);
            for (r, mut row) in target.axis_iter_mut(Axis(0)).enumerate() {
                let br = b[r];
                row.slice_mut(s![..n]).mapv_inplace(|v| v + br);
            }
            if l + 1 < depth {
                let next = &mut after[0];
                resize(next, rows, cols);
                tanh_forward(self.pre[l].view(), next.view_mut(), n, ch);
            }
        }
    }

    /// Accumulates `∂L/∂θ` into `grad` given `d_output = ∂L/∂output` for the
    /// last forward pass.
    pub fn backward(
        &mut self,
        params: &NetworkParams<T>,
        d_output: ArrayView2<'_, T>,
        grad: &mut ParamGradient<T>,
    ) {
        let n = self.n;
        let ch = self.order.expect("forward before backward").channels();
        let cols = ch * n;
        let depth = params.depth();
        assert_eq!(d_output.dim(), (params.output_width(), cols));

        // grad_pre holds ∂L/∂(pre-activation of the current layer)
        resize(&mut self.grad_pre, d_output.nrows(), cols);
        self.grad_pre.assign(&d_output);

        for l in (0..depth).rev() {
            let input = &self.inputs[l];
            general_mat_mul(T::one(), &self.grad_pre, &input.t(), T::one(), &mut grad.weights[l]);
            let gb = &mut grad.biases[l];
            for (r, row) in self.grad_pre.axis_iter(Axis(0)).enumerate() {
                gb[r] += row.slice(s![..n]).sum();
            }
            if l == 0 {
                break;
            }
            let w = &params.weights[l];
            resize(&mut self.grad_in, w.ncols(), cols);
            general_mat_mul(T::one(), &w.t(), &self.grad_pre, T::zero(), &mut self.grad_in);
            resize(&mut self.grad_pre, w.ncols(), cols);
            tanh_backward(
                self.pre[l - 1].view(),
                self.inputs[l].view(),
                self.grad_in.view(),
                self.grad_pre.view_mut(),
                n,
                ch,
            );
        }
    }
}

fn tanh_forward<T: Real>(z: ArrayView2<'_, T>, mut a: ArrayViewMut2<'_, T>, n: usize, ch: usize) {
    let two = T::lit(2.0);
    for (zr, mut ar) in z.axis_iter(Axis(0)).zip(a.axis_iter_mut(Axis(0))) {
        let zr = zr.as_slice().expect("row-major");
        let ar = ar.as_slice_mut().expect("row-major");
        for i in 0..n {
            let s = num_traits::Float::tanh(zr[i]);
            ar[i] = s;
            if ch == 1 {
                continue;
            }
            let s1 = T::one() - s * s;
            let gx = zr[n + i];
            let gy = zr[2 * n + i];
            ar[n + i] = s1 * gx;
            ar[2 * n + i] = s1 * gy;
            if ch == 6 {
                let s2 = -two * s * s1;
                ar[3 * n + i] = s2 * gx * gx + s1 * zr[3 * n + i];
                ar[4 * n + i] = s2 * gx * gy + s1 * zr[4 * n + i];
                ar[5 * n + i] = s2 * gy * gy + s1 * zr[5 * n + i];
            }
        }
    }
}

fn tanh_backward<T: Real>(
    z: ArrayView2<'_, T>,
    a: ArrayView2<'_, T>,
    da: ArrayView2<'_, T>,
    mut dz: ArrayViewMut2<'_, T>,
    n: usize,
    ch: usize,
) {
    let two = T::lit(2.0);
    let rows = z.axis_iter(Axis(0)).zip(a.axis_iter(Axis(0)));
    for ((zr, ar), (dar, mut dzr)) in rows.zip(da.axis_iter(Axis(0)).zip(dz.axis_iter_mut(Axis(0)))) {
        let zr = zr.as_slice().expect("row-major");
        let ar = ar.as_slice().expect("row-major");
        let dar = dar.as_slice().expect("row-major");
        let dzr = dzr.as_slice_mut().expect("row-major");
        for i in 0..n {
            let s = ar[i];
            let s1 = T::one() - s * s;
            match ch {
                1 => dzr[i] = dar[i] * s1,
                3 => {
                    let s2 = -two * s * s1;
                    let (gx, gy) = (zr[n + i], zr[2 * n + i]);
                    let (d1, d2) = (dar[n + i], dar[2 * n + i]);
                    dzr[i] = dar[i] * s1 + (d1 * gx + d2 * gy) * s2;
                    dzr[n + i] = d1 * s1;
                    dzr[2 * n + i] = d2 * s1;
                }
                _ => {
                    let s2 = -two * s * s1;
                    let s3 = -two * (s1 * s1 + s * s2);
                    let (gx, gy) = (zr[n + i], zr[2 * n + i]);
                    let (hxx, hxy, hyy) = (zr[3 * n + i], zr[4 * n + i], zr[5 * n + i]);
                    let (d1, d2) = (dar[n + i], dar[2 * n + i]);
                    let (d3, d4, d5) = (dar[3 * n + i], dar[4 * n + i], dar[5 * n + i]);
                    dzr[i] = dar[i] * s1
                        + s2 * (d1 * gx + d2 * gy)
                        + d3 * (s3 * gx * gx + s2 * hxx)
                        + d4 * (s3 * gx * gy + s2 * hxy)
                        + d5 * (s3 * gy * gy + s2 * hyy);
                    dzr[n + i] = d1 * s1 + s2 * (two * d3 * gx + d4 * gy);
                    dzr[2 * n + i] = d2 * s1 + s2 * (two * d5 * gy + d4 * gx);
                    dzr[3 * n + i] = d3 * s1;
                    dzr[4 * n + i] = d4 * s1;
                    dzr[5 * n + i] = d5 * s1;
                }
            }
        }
    }
}
