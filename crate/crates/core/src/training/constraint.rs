//! Collocation constraints compiled to affine rows over network output jets.
//!
//! Every residual used here is affine in the network outputs and their spatial
//! derivatives once the medium is fixed. A constraint at a point is therefore
//! stored as `r = offset + Σ coef · out[o].channel[ch]`, extracted once with
//! the tape, and each epoch only needs the batched network pass.

use ndarray::Array2;

use crate::autodiff::{Jet2, Tape, Var};
use crate::error::{Error, Result};
use crate::geometry::Segment;
use crate::network::batched::{BatchEngine, Order};
use crate::network::{NetworkParams, ParamGradient};
use crate::scalar::{Point2, Real, Scalar};

use super::LossWeights;

const CHANNELS: usize = 6;

/// A pointwise residual with one or more components.
pub trait PointResidual<T: Real> {
    fn components(&self) -> usize;

    /// Writes the residual components into `res` given the output jets.
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]);
}

/// `offset + Σ coef · out[o].channel[ch]` with terms keyed by `o·6 + ch`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineRow<T> {
    pub offset: T,
    pub terms: Vec<(u16, T)>,
}

impl<T: Real> AffineRow<T> {
    pub fn eval(&self, channel: impl Fn(usize, usize) -> T) -> T {
        self.terms.iter().fold(self.offset, |acc, &(k, c)| {
            let k = k as usize;
            acc + c * channel(k / CHANNELS, k % CHANNELS)
        })
    }

    fn order(&self) -> Order {
        self.terms
            .iter()
            .map(|&(k, _)| Order::for_channel(k as usize % CHANNELS))
            .max()
            .unwrap_or(Order::Value)
    }
}

/// Extracts the affine rows of `form` for a network with `outputs` outputs
/// and checks that the form really is affine.
pub fn compile<T: Real>(form: &impl PointResidual<T>, outputs: usize) -> Result<Vec<AffineRow<T>>> {
    let m = form.components();
    let tape = Tape::new();
    let jets: Vec<Jet2<Var<'_, T>>> = (0..outputs)
        .map(|_| Jet2::from_channels(std::array::from_fn(|_| tape.var(T::zero()))))
        .collect();
    let mut res = vec![Var::constant(T::zero()); m];
    form.residual(&jets, &mut res);
    let mut rows = Vec::with_capacity(m);
    for r in &res {
        let adj = tape.gradient(r);
        let mut terms = Vec::new();
        for (o, jet) in jets.iter().enumerate() {
            for (ch, v) in jet.channels().iter().enumerate() {
                let c = v.index().map_or(T::zero(), |i| adj[i]);
                if c != T::zero() {
                    terms.push(((o * CHANNELS + ch) as u16, c));
                }
            }
        }
        rows.push(AffineRow {
            offset: r.value(),
            terms,
        });
    }

    // probe with arbitrary jets: an affine form reproduces its rows exactly
    // up to rounding
    let probe = |o: usize, ch: usize| T::lit(0.37 + 0.61 * ((o * 7 + ch * 3) % 11) as f64 - 2.9);
    let jets: Vec<Jet2<T>> = (0..outputs)
        .map(|o| Jet2::from_channels(std::array::from_fn(|ch| probe(o, ch))))
        .collect();
    let mut direct = vec![T::zero(); m];
    form.residual(&jets, &mut direct);
    for (row, d) in rows.iter().zip(&direct) {
        let via_row = row.eval(probe);
        let scale = T::one() + row.offset.abs() + row.terms.iter().fold(T::zero(), |a, t| a + t.1.abs());
        if !((via_row - *d).abs() <= T::lit(1e-9) * scale) {
            return Err(Error::config("residual is not affine in the network outputs"));
        }
    }
    Ok(rows)
}

/// Which loss term a constraint feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    Pde,
    Boundary(Segment),
}

#[derive(Clone, Debug)]
struct Block<T> {
    order: Order,
    points: Vec<Point2<T>>,
    /// Row range of point `i` is `start[i]..start[i + 1]`.
    start: Vec<usize>,
    rows: Vec<AffineRow<T>>,
    segments: Vec<Option<Segment>>,
}

impl<T: Real> Block<T> {
    fn new() -> Self {
        Self {
            order: Order::Value,
            points: Vec::new(),
            start: vec![0],
            rows: Vec::new(),
            segments: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }
}

/// Per-term loss values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossBreakdown<T> {
    pub total: T,
    /// Mean over interior points of the squared residual norm.
    pub l_pde: T,
    /// Mean over boundary points of the squared mismatch.
    pub l_bc: T,
}

/// All compiled constraints of one network.
#[derive(Clone, Debug)]
pub struct ConstraintSet<T> {
    outputs: usize,
    pde: Block<T>,
    bc: Block<T>,
    chunk: usize,
}

impl<T: Real> ConstraintSet<T> {
    /// Empty set for a network with `outputs` outputs.
    pub fn new(outputs: usize) -> Self {
        Self {
            outputs,
            pde: Block::new(),
            bc: Block::new(),
            chunk: 1024,
        }
    }

    /// Points per batched pass.
    pub fn with_chunk(mut self, chunk: usize) -> Self {
        self.chunk = chunk.max(1);
        self
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn interior_len(&self) -> usize {
        self.pde.len()
    }

    pub fn boundary_len(&self) -> usize {
        self.bc.len()
    }

    pub fn push(&mut self, x: Point2<T>, kind: TermKind, form: &impl PointResidual<T>) -> Result<()> {
        let rows = compile(form, self.outputs)?;
        self.push_rows(x, kind, rows);
        Ok(())
    }

    pub fn push_rows(&mut self, x: Point2<T>, kind: TermKind, rows: Vec<AffineRow<T>>) {
        let (block, segment) = match kind {
            TermKind::Pde => (&mut self.pde, None),
            TermKind::Boundary(s) => (&mut self.bc, Some(s)),
        };
        for r in &rows {
            block.order = block.order.max(r.order());
        }
        block.points.push(x);
        block.rows.extend(rows);
        block.start.push(block.rows.len());
        block.segments.push(segment);
    }

    fn check(&self, params: &NetworkParams<T>) -> Result<()> {
        if self.pde.len() == 0 {
            return Err(Error::config("no interior collocation points"));
        }
        if self.bc.len() == 0 {
            return Err(Error::config("no boundary collocation points"));
        }
        if params.output_width() != self.outputs {
            return Err(Error::config(format!(
                "network has {} outputs, constraints expect {}",
                params.output_width(),
                self.outputs
            )));
        }
        Ok(())
    }

    /// Loss of `params`; accumulates `∂total/∂θ` into `grad` when given.
    pub fn assemble_loss(
        &self,
        params: &NetworkParams<T>,
        weights: &LossWeights<T>,
        engine: &mut BatchEngine<T>,
        mut grad: Option<&mut ParamGradient<T>>,
    ) -> Result<LossBreakdown<T>> {
        self.check(params)?;
        weights.validate()?;
        let n_pde = T::lit(self.pde.len() as f64);
        let n_bc = T::lit(self.bc.len() as f64);
        let sum_pde = self.block_loss(&self.pde, params, engine, grad.as_deref_mut(), "pde", |_| {
            weights.pde / n_pde
        })?;
        let sum_bc = self.block_loss(&self.bc, params, engine, grad, "bc", |seg| {
            weights.for_segment(seg.expect("boundary rows carry a segment")) / n_bc
        })?;
        Ok(LossBreakdown {
            total: sum_pde.1 + sum_bc.1,
            l_pde: sum_pde.0 / n_pde,
            l_bc: sum_bc.0 / n_bc,
        })
    }

    /// Returns (Σ r², Σ w r²) over the block.
    fn block_loss(
        &self,
        block: &Block<T>,
        params: &NetworkParams<T>,
        engine: &mut BatchEngine<T>,
        mut grad: Option<&mut ParamGradient<T>>,
        term: &str,
        weight: impl Fn(Option<Segment>) -> T,
    ) -> Result<(T, T)> {
        let ch = block.order.channels();
        let mut plain = T::zero();
        let mut weighted = T::zero();
        let mut d_out = Array2::<T>::zeros((0, 0));
        for lo in (0..block.len()).step_by(self.chunk) {
            let hi = (lo + self.chunk).min(block.len());
            let n = hi - lo;
            engine.forward(params, &block.points[lo..hi], block.order);
            if grad.is_some() {
                if d_out.dim() != (self.outputs, ch * n) {
                    d_out = Array2::zeros((self.outputs, ch * n));
                } else {
                    d_out.fill(T::zero());
                }
            }
            for i in 0..n {
                let p = lo + i;
                let w = weight(block.segments[p]);
                for row in &block.rows[block.start[p]..block.start[p + 1]] {
                    let r = row.eval(|o, c| engine.get(o, c, i));
                    plain += r * r;
                    weighted += w * r * r;
                    if grad.is_some() {
                        let g = T::lit(2.0) * w * r;
                        for &(k, c) in &row.terms {
                            let k = k as usize;
                            d_out[[k / CHANNELS, (k % CHANNELS) * n + i]] += g * c;
                        }
                    }
                }
            }
            if let Some(g) = grad.as_deref_mut() {
                if d_out.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteGradient { term: term.into() });
                }
                engine.backward(params, d_out.view(), g);
            }
        }
        if !weighted.is_finite() {
            return Err(Error::NonFiniteLoss(weighted.to_f64_lossy()));
        }
        Ok((plain, weighted))
    }

    /// Residual rows of every interior point, evaluated pointwise (slow path
    /// for diagnostics and tests).
    pub fn interior_residuals(&self, params: &NetworkParams<T>) -> Vec<Vec<T>> {
        residuals_of(&self.pde, params)
    }

    pub fn boundary_residuals(&self, params: &NetworkParams<T>) -> Vec<Vec<T>> {
        residuals_of(&self.bc, params)
    }
}

fn residuals_of<T: Real>(block: &Block<T>, params: &NetworkParams<T>) -> Vec<Vec<T>> {
    (0..block.len())
        .map(|p| {
            let jets = params.eval_jets(block.points[p]);
            block.rows[block.start[p]..block.start[p + 1]]
                .iter()
                .map(|row| row.eval(|o, c| jets[o].channels()[c]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{eval_param_gradient, ParamLoss};
    use crate::physics::{darcy_residual_jets, MediumModel};

    struct Darcy(MediumModel<f64>, f64);
    impl PointResidual<f64> for Darcy {
        fn components(&self) -> usize {
            3
        }
        fn residual<S: Scalar<Real = f64>>(&self, out: &[Jet2<S>], res: &mut [S]) {
            let r = darcy_residual_jets(out, self.1, &self.0);
            res.copy_from_slice(&[r.momentum[0], r.momentum[1], r.mass]);
        }
    }

    struct Value(f64);
    impl PointResidual<f64> for Value {
        fn components(&self) -> usize {
            1
        }
        fn residual<S: Scalar<Real = f64>>(&self, out: &[Jet2<S>], res: &mut [S]) {
            res[0] = out[0].value.shift(-self.0);
        }
    }

    struct Laplace;
    impl PointResidual<f64> for Laplace {
        fn components(&self) -> usize {
            1
        }
        fn residual<S: Scalar<Real = f64>>(&self, out: &[Jet2<S>], res: &mut [S]) {
            res[0] = out[0].laplacian();
        }
    }

    struct Square;
    impl PointResidual<f64> for Square {
        fn components(&self) -> usize {
            1
        }
        fn residual<S: Scalar<Real = f64>>(&self, out: &[Jet2<S>], res: &mut [S]) {
            res[0] = out[0].value * out[0].value;
        }
    }

    #[test]
    fn darcy_rows() {
        let rows = compile(&Darcy(MediumModel::homogeneous(4.0), 4.0), 3).unwrap();
        // momentum_x = 0.25 v_x + p_x
        assert_eq!(rows[0].terms, vec![(0, 0.25), (2 * 6 + 1, 1.0)]);
        assert_eq!(rows[2].terms, vec![(1, 1.0), (6 + 2, 1.0)]);
        assert_eq!(rows[0].order(), Order::Gradient);
        assert_eq!(compile(&Laplace, 1).unwrap()[0].order(), Order::Hessian);
        assert_eq!(compile(&Value(2.0), 1).unwrap()[0].offset, -2.0);
    }

    #[test]
    fn nonlinear_form_is_rejected() {
        assert!(compile(&Square, 1).is_err());
    }

    fn constant_net(c: f64) -> NetworkParams<f64> {
        let mut n = NetworkParams::zeros(&[2, 1]).unwrap();
        n.biases[0][0] = c;
        n
    }

    fn toy_set(interior: f64, boundary: f64) -> ConstraintSet<f64> {
        let mut set = ConstraintSet::new(1);
        set.push([0.5, 0.5], TermKind::Pde, &Value(-interior)).unwrap();
        set.push([0.0, 0.5], TermKind::Boundary(Segment::Left), &Value(-boundary)).unwrap();
        set
    }

    #[test]
    fn weighted_sum_examples() {
        let net = constant_net(0.0);
        let mut engine = BatchEngine::new();
        let set = toy_set(3.0, 4.0);
        let l = set.assemble_loss(&net, &LossWeights::new(1.0, 1.0), &mut engine, None).unwrap();
        assert_eq!((l.total, l.l_pde, l.l_bc), (25.0, 9.0, 16.0));
        let l = set.assemble_loss(&net, &LossWeights::new(2.0, 1.0), &mut engine, None).unwrap();
        assert_eq!(l.total, 34.0);
    }

    #[test]
    fn exact_solution_has_zero_loss() {
        let set = toy_set(-1.5, -1.5);
        let l = set
            .assemble_loss(&constant_net(1.5), &LossWeights::default(), &mut BatchEngine::new(), None)
            .unwrap();
        assert_eq!(l.total, 0.0);
    }

    #[test]
    fn empty_sets_are_rejected() {
        let net = constant_net(0.0);
        let mut set = ConstraintSet::new(1);
        set.push([0.5, 0.5], TermKind::Pde, &Value(0.0)).unwrap();
        let err = set.assemble_loss(&net, &LossWeights::default(), &mut BatchEngine::new(), None);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    /// Same loss written directly over network parameters.
    struct Direct<'a>(&'a [(Point2<f64>, bool)], f64, f64);
    impl ParamLoss<f64> for Direct<'_> {
        fn eval<S: Scalar<Real = f64>>(&self, p: &NetworkParams<S>) -> S {
            let n_int = self.0.iter().filter(|q| q.1).count() as f64;
            let n_bc = self.0.len() as f64 - n_int;
            let mut total = S::zero();
            for &(x, interior) in self.0 {
                let c = p.forward_jets_over(x)[0];
                let r = if interior { c.laplacian() } else { c.value.shift(-1.0) };
                let w = if interior { self.1 / n_int } else { self.2 / n_bc };
                total = total + (r * r).scale(w);
            }
            total
        }
    }

    #[test]
    fn gradient_matches_tape_and_finite_differences() {
        let net = NetworkParams::<f64>::init(&[2, 5, 4, 1], 3).unwrap();
        assert!(net.num_params() <= 50);
        let pts: Vec<(Point2<f64>, bool)> = (0..9)
            .map(|i| ([0.1 * i as f64 + 0.05, 0.3 + 0.05 * i as f64], i % 3 != 0))
            .collect();
        let mut set = ConstraintSet::new(1).with_chunk(2);
        for &(x, interior) in &pts {
            if interior {
                set.push(x, TermKind::Pde, &Laplace).unwrap();
            } else {
                set.push(x, TermKind::Boundary(Segment::Left), &Value(1.0)).unwrap();
            }
        }
        let w = LossWeights::new(1.5, 10.0);
        let mut engine = BatchEngine::new();
        let mut grad = net.map(|_| 0.0);
        let l = set.assemble_loss(&net, &w, &mut engine, Some(&mut grad)).unwrap();

        let direct = Direct(&pts, 1.5, 10.0);
        assert!((direct.eval(&net) - l.total).abs() < 1e-12 * l.total);
        let tape = eval_param_gradient(&direct, &net).unwrap();
        for (a, b) in grad.iter().zip(tape.iter()) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }

        let h = 1e-6;
        let mut probe = net.clone();
        let loss = |p: &NetworkParams<f64>, e: &mut BatchEngine<f64>| set.assemble_loss(p, &w, e, None).unwrap().total;
        for k in 0..net.num_params() {
            let orig = *probe.iter().nth(k).unwrap();
            *probe.iter_mut().nth(k).unwrap() = orig + h;
            let up = loss(&probe, &mut engine);
            *probe.iter_mut().nth(k).unwrap() = orig - h;
            let down = loss(&probe, &mut engine);
            *probe.iter_mut().nth(k).unwrap() = orig;
            let fd = (up - down) / (2.0 * h);
            let g = *grad.iter().nth(k).unwrap();
            assert!((fd - g).abs() <= 1e-5 * g.abs().max(1e-3), "param {k}: fd {fd} vs {g}");
        }
    }

    #[test]
    fn loss_is_linear_in_weights() {
        let net = NetworkParams::<f64>::init(&[2, 6, 1], 9).unwrap();
        let mut set = ConstraintSet::new(1);
        for i in 1..6 {
            set.push([0.15 * i as f64, 0.5], TermKind::Pde, &Laplace).unwrap();
            set.push([0.0, 0.2 * i as f64 - 0.1], TermKind::Boundary(Segment::Left), &Value(0.3)).unwrap();
        }
        let mut e = BatchEngine::new();
        let l = |a: f64, b: f64, e: &mut BatchEngine<f64>| {
            set.assemble_loss(&net, &LossWeights::new(a, b), e, None).unwrap().total
        };
        let (l10, l01) = (l(1.0, 1e-300, &mut e), l(1e-300, 1.0, &mut e));
        assert!((l(2.5, 7.0, &mut e) - (2.5 * l10 + 7.0 * l01)).abs() < 1e-12 * l(2.5, 7.0, &mut e));
    }

    #[test]
    fn segment_override() {
        let net = constant_net(0.0);
        let mut set = ConstraintSet::new(1);
        set.push([0.5, 0.5], TermKind::Pde, &Value(0.0)).unwrap();
        set.push([0.0, 0.5], TermKind::Boundary(Segment::Left), &Value(1.0)).unwrap();
        set.push([1.0, 0.5], TermKind::Boundary(Segment::Right), &Value(1.0)).unwrap();
        let w = LossWeights::new(1.0, 1.0).with_segment(Segment::Right, 3.0);
        let l = set.assemble_loss(&net, &w, &mut BatchEngine::new(), None).unwrap();
        assert_eq!(l.total, (1.0 + 3.0) / 2.0);
        assert_eq!(l.l_bc, 1.0);
    }
}
