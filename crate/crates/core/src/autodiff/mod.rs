//! Exact differentiation.
//!
//! Spatial derivatives up to second order are carried forward with [`Jet2`];
//! derivatives of scalar losses with respect to network parameters are taken
//! in reverse mode on a [`Tape`]. The batched training path in
//! [`crate::network::batched`] implements the same reverse sweep with
//! matrix products and is checked against this module.

mod jet;
mod tape;

pub use jet::Jet2;
pub use tape::{Tape, Var};

use crate::error::{Error, Result};
use crate::network::{NetworkParams, ParamGradient};
use crate::scalar::{Point2, Real, Scalar};

/// Value, gradient and Hessian of `field` at `x`.
///
/// `field` receives the seeded coordinate jets `[x, y]`.
pub fn eval_jet2<T, F>(field: F, x: Point2<T>) -> Result<Jet2<T>>
where
    T: Real,
    F: FnOnce([Jet2<T>; 2]) -> Jet2<T>,
{
    let jet = field(Jet2::seed(x));
    if !jet.is_finite() {
        return Err(Error::NonFinite {
            what: "jet",
            x: x[0].to_f64_lossy(),
            y: x[1].to_f64_lossy(),
        });
    }
    Ok(jet)
}

/// A scalar loss over network parameters that can be evaluated over any
/// differentiable scalar.
pub trait ParamLoss<T: Real> {
    fn eval<S: Scalar<Real = T>>(&self, params: &NetworkParams<S>) -> S;
}

/// `∂loss/∂θ` for every weight and bias of `params`.
pub fn eval_param_gradient<T: Real, L: ParamLoss<T>>(
    loss: &L,
    params: &NetworkParams<T>,
) -> Result<ParamGradient<T>> {
    let primal = loss.eval(params);
    if !primal.is_finite() {
        return Err(Error::NonFiniteLoss(primal.to_f64_lossy()));
    }
    let tape = Tape::new();
    let vars = params.map(|w| tape.var(*w));
    let out = loss.eval(&vars);
    let adj = tape.gradient(&out);
    let grad = vars.map(|v| v.index().map_or(T::zero(), |i| adj[i]));
    if !grad.all_finite() {
        return Err(Error::NonFiniteGradient {
            term: "loss".into(),
        });
    }
    Ok(grad)
}
