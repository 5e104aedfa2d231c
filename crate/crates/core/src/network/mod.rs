//! Fully-connected tanh networks.
//!
//! Hidden layers apply `σ = tanh(W σ_prev + b)`; the output layer is affine.
//! Parameters are stored per layer, weights as `n_out × n_in` matrices.

pub mod batched;
pub mod checkpoint;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::autodiff::Jet2;
use crate::error::{Error, Result};
use crate::scalar::{Point2, Real, Scalar};

/// Trainable state of a network: one weight matrix and bias vector per layer.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams<S> {
    layer_sizes: Vec<usize>,
    pub weights: Vec<Array2<S>>,
    pub biases: Vec<Array1<S>>,
    pub seed: u64,
}

/// Gradient of a scalar loss, congruent with the [`NetworkParams`] it was
/// taken at.
pub type ParamGradient<T> = NetworkParams<T>;

fn check_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::config("a network needs input and output layers"));
    }
    if let Some(pos) = layer_sizes.iter().position(|&n| n == 0) {
        return Err(Error::config(format!("layer {pos} has zero width")));
    }
    Ok(())
}

impl<S> NetworkParams<S> {
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Number of affine layers (hidden + output).
    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn map<Q>(&self, mut f: impl FnMut(&S) -> Q) -> NetworkParams<Q> {
        NetworkParams {
            layer_sizes: self.layer_sizes.clone(),
            weights: self.weights.iter().map(|w| w.map(&mut f)).collect(),
            biases: self.biases.iter().map(|b| b.map(&mut f)).collect(),
            seed: self.seed,
        }
    }

    /// Every parameter in layer order, weights (row-major) before biases.
    pub fn iter(&self) -> impl Iterator<Item = &S> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut S> {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| w.iter_mut().chain(b.iter_mut()))
    }

    pub fn same_shape<Q>(&self, other: &NetworkParams<Q>) -> bool {
        self.layer_sizes == other.layer_sizes
    }
}

impl<T: Real> NetworkParams<T> {
    /// Glorot-normal weights and zero biases, deterministic in `seed`.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (n_in, n_out) = (pair[0], pair[1]);
            let std = (2.0 / (n_in + n_out) as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("positive std");
            let w = Array2::from_shape_simple_fn((n_out, n_in), || T::lit(normal.sample(&mut rng)));
            weights.push(w);
            biases.push(Array1::zeros(n_out));
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            seed,
        })
    }

    /// All-zero parameters with the given shape.
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let weights = layer_sizes
            .windows(2)
            .map(|p| Array2::zeros((p[1], p[0])))
            .collect();
        let biases = layer_sizes[1..].iter().map(|&n| Array1::zeros(n)).collect();
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            seed: 0,
        })
    }

    /// Builds parameters from explicit layer matrices.
    pub fn from_layers(weights: Vec<Array2<T>>, biases: Vec<Array1<T>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::config("weights and biases must have one entry per layer"));
        }
        let mut sizes = vec![weights[0].ncols()];
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.ncols() != *sizes.last().unwrap() || b.len() != w.nrows() {
                return Err(Error::config(format!("layer {l} shapes do not chain")));
            }
            sizes.push(w.nrows());
        }
        check_sizes(&sizes)?;
        Ok(Self {
            layer_sizes: sizes,
            weights,
            biases,
            seed: 0,
        })
    }

    pub fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    /// Evaluates the network at `x` over any scalar type; with
    /// [`Jet2`] inputs this yields exact spatial derivatives of every output.
    pub fn forward<S: Scalar<Real = T>>(&self, x: [S; 2]) -> Vec<S> {
        forward_generic(&self.weights, &self.biases, &x, |w| S::from_real(*w))
    }

    /// Plain value evaluation.
    pub fn eval(&self, x: Point2<T>) -> Vec<T> {
        self.forward(x)
    }

    /// Output jets (value, gradient, Hessian) at `x`.
    pub fn eval_jets(&self, x: Point2<T>) -> Vec<Jet2<T>> {
        self.forward(Jet2::seed(x))
    }

    /// Hidden-layer activations at `x`, one vector per hidden layer.
    pub fn hidden_activations(&self, x: Point2<T>) -> Vec<Vec<T>> {
        let mut act = x.to_vec();
        let mut out = Vec::new();
        for (w, b) in self.weights[..self.depth() - 1].iter().zip(&self.biases) {
            act = affine(w, b, &act, |v| *v)
                .into_iter()
                .map(num_traits::Float::tanh)
                .collect();
            out.push(act.clone());
        }
        out
    }
}

impl<S: Scalar> NetworkParams<S> {
    /// Evaluates a network whose parameters are themselves differentiable
    /// (e.g. tape variables) at `x`, returning output jets over `S`.
    pub fn forward_jets_over(&self, x: Point2<S::Real>) -> Vec<Jet2<S>> {
        let seeds = Jet2::seed([S::from_real(x[0]), S::from_real(x[1])]);
        forward_generic(&self.weights, &self.biases, &seeds, |w| Jet2::constant(*w))
    }
}

fn affine<P, S: Scalar>(
    w: &Array2<P>,
    b: &Array1<P>,
    input: &[S],
    lift: impl Fn(&P) -> S,
) -> Vec<S> {
    (0..w.nrows())
        .map(|r| {
            let mut acc = lift(&b[r]);
            for (c, a) in input.iter().enumerate() {
                acc = acc + *a * lift(&w[[r, c]]);
            }
            acc
        })
        .collect()
}

fn forward_generic<P, S: Scalar>(
    weights: &[Array2<P>],
    biases: &[Array1<P>],
    x: &[S],
    lift: impl Fn(&P) -> S,
) -> Vec<S> {
    let last = weights.len() - 1;
    let mut act = x.to_vec();
    for (l, (w, b)) in weights.iter().zip(biases).enumerate() {
        act = affine(w, b, &act, &lift);
        if l < last {
            act = act.into_iter().map(S::tanh).collect();
        }
    }
    act
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn init_is_deterministic() {
        let a = NetworkParams::<f64>::init(&[2, 50, 50, 1], 42).unwrap();
        let b = NetworkParams::<f64>::init(&[2, 50, 50, 1], 42).unwrap();
        assert_eq!(a, b);
        let c = NetworkParams::<f64>::init(&[2, 50, 50, 1], 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_biases_are_zero() {
        let p = NetworkParams::<f64>::init(&[2, 1], 9).unwrap();
        assert_eq!(p.biases[0], array![0.0]);
    }

    #[test]
    fn init_rejects_zero_width() {
        assert!(matches!(
            NetworkParams::<f64>::init(&[2, 0, 1], 1),
            Err(Error::Config(_))
        ));
        assert!(NetworkParams::<f64>::init(&[2], 1).is_err());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let p = NetworkParams::<f64>::zeros(&[2, 8, 8, 3]).unwrap();
        assert_eq!(p.eval([0.3, -7.0]), vec![0.0; 3]);
    }

    #[test]
    fn single_affine_layer() {
        let p = NetworkParams::from_layers(vec![array![[1.0, 0.0]]], vec![array![0.0]]).unwrap();
        assert_eq!(p.eval([3.0, 5.0]), vec![3.0]);
    }

    #[test]
    fn hidden_activations_are_bounded() {
        let p = NetworkParams::<f64>::init(&[2, 16, 16, 1], 3).unwrap();
        for x in [[0.0, 0.0], [10.0, -4.0], [0.5, 0.5]] {
            for layer in p.hidden_activations(x) {
                assert!(layer.iter().all(|a| a.abs() < 1.0));
            }
        }
    }
}
