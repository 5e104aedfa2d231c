//! Adam with bias correction.

use crate::error::{Error, Result};
use crate::network::{NetworkParams, ParamGradient};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Real> Default for AdamConfig<T> {
    fn default() -> Self {
        Self {
            lr: T::lit(1e-3),
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
        }
    }
}

impl<T: Real> AdamConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |b: T| b >= T::zero() && b < T::one();
        if !(self.lr > T::zero()) || !unit(self.beta1) || !unit(self.beta2) || !(self.eps > T::zero()) {
            return Err(Error::config(format!("invalid Adam settings {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub m: NetworkParams<T>,
    pub v: NetworkParams<T>,
    pub t: u64,
    pub config: AdamConfig<T>,
}

impl<T: Real> AdamState<T> {
    pub fn new(params: &NetworkParams<T>, config: AdamConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            m: params.map(|_| T::zero()),
            v: params.map(|_| T::zero()),
            t: 0,
            config,
        })
    }
}

/// One Adam update of `params` in place.
pub fn adam_step<T: Real>(params: &mut NetworkParams<T>, grad: &ParamGradient<T>, state: &mut AdamState<T>) -> Result<()> {
    if !params.same_shape(grad) || !params.same_shape(&state.m) {
        return Err(Error::config("parameter, gradient and optimiser shapes differ"));
    }
    if !grad.all_finite() {
        return Err(Error::NonFiniteGradient { term: "total".into() });
    }
    let AdamConfig { lr, beta1, beta2, eps } = state.config;
    state.t += 1;
    let t = state.t as i32;
    let c1 = T::one() - beta1.powi(t);
    let c2 = T::one() - beta2.powi(t);
    let theta = params.iter_mut();
    let ms = state.m.iter_mut();
    let vs = state.v.iter_mut();
    for (((p, &g), m), v) in theta.zip(grad.iter()).zip(ms).zip(vs) {
        *m = beta1 * *m + (T::one() - beta1) * g;
        *v = beta2 * *v + (T::one() - beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn scalar_net(w: f64) -> NetworkParams<f64> {
        NetworkParams::from_layers(vec![array![[w, 0.0]]], vec![array![0.0]]).unwrap()
    }

    #[test]
    fn zero_gradient_keeps_params() {
        let mut p = NetworkParams::<f64>::init(&[2, 4, 1], 5).unwrap();
        let before = p.clone();
        let mut s = AdamState::new(&p, AdamConfig::default()).unwrap();
        let zero = p.map(|_| 0.0);
        adam_step(&mut p, &zero, &mut s).unwrap();
        assert_eq!(p, before);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn first_step_is_lr_times_sign() {
        let mut p = scalar_net(0.3);
        let mut s = AdamState::new(&p, AdamConfig::default()).unwrap();
        adam_step(&mut p, &scalar_net(0.5), &mut s).unwrap();
        let step = p.weights[0][[0, 0]] - 0.3;
        assert!((step + 1e-3 * 0.5 / (0.5 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn two_steps_match_reference_recurrence() {
        let g = 0.5;
        let (b1, b2, eps, lr): (f64, f64, f64, f64) = (0.9, 0.999, 1e-8, 1e-3);
        let m1 = (1.0 - b1) * g;
        let v1 = (1.0 - b2) * g * g;
        let m2 = b1 * m1 + (1.0 - b1) * g;
        let v2 = b2 * v1 + (1.0 - b2) * g * g;
        let step2 = lr * (m2 / (1.0 - b1 * b1)) / ((v2 / (1.0 - b2 * b2)).sqrt() + eps);

        let mut p = scalar_net(0.0);
        let mut s = AdamState::new(&p, AdamConfig::default()).unwrap();
        adam_step(&mut p, &scalar_net(g), &mut s).unwrap();
        let after1 = p.weights[0][[0, 0]];
        adam_step(&mut p, &scalar_net(g), &mut s).unwrap();
        let d2 = after1 - p.weights[0][[0, 0]];
        assert!((d2 - step2).abs() < 1e-12);
    }

    #[test]
    fn non_finite_gradient_aborts() {
        let mut p = scalar_net(0.0);
        let mut s = AdamState::new(&p, AdamConfig::default()).unwrap();
        let err = adam_step(&mut p, &scalar_net(f64::NAN), &mut s).unwrap_err();
        assert!(matches!(err, Error::NonFiniteGradient { .. }));
    }

    #[test]
    fn invalid_config() {
        let p = scalar_net(0.0);
        let bad = AdamConfig { beta1: 1.0, ..AdamConfig::default() };
        assert!(AdamState::new(&p, bad).is_err());
    }
}
