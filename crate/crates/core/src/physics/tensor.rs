//! Symmetric 2×2 tensors: dispersion and rotated anisotropy.

use num_traits::Float;

use crate::autodiff::Jet2;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Symmetric 2×2 tensor `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymTensor2<S> {
    pub xx: S,
    pub xy: S,
    pub yy: S,
}

impl<S: Scalar> SymTensor2<S> {
    pub fn new(xx: S, xy: S, yy: S) -> Self {
        Self { xx, xy, yy }
    }

    pub fn diag(xx: S, yy: S) -> Self {
        Self::new(xx, S::zero(), yy)
    }

    pub fn identity() -> Self {
        Self::diag(S::lit(1.0), S::lit(1.0))
    }

    pub fn apply(&self, v: [S; 2]) -> [S; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    pub fn trace(&self) -> S {
        self.xx + self.yy
    }

    pub fn det(&self) -> S {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn scaled(&self, k: S::Real) -> Self {
        Self::new(self.xx.scale(k), self.xy.scale(k), self.yy.scale(k))
    }

    pub fn map<Q>(&self, f: impl Fn(S) -> Q) -> SymTensor2<Q> {
        SymTensor2 {
            xx: f(self.xx),
            xy: f(self.xy),
            yy: f(self.yy),
        }
    }

    pub fn value(&self) -> SymTensor2<S::Real> {
        self.map(|v| v.value())
    }
}

impl<T: Real> SymTensor2<T> {
    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half_tr = (self.xx + self.yy) * T::lit(0.5);
        let half_diff = (self.xx - self.yy) * T::lit(0.5);
        let r = Float::hypot(half_diff, self.xy);
        [half_tr + r, half_tr - r]
    }

    /// Unit eigenvector of the larger eigenvalue, sign chosen with a
    /// non-negative x component.
    pub fn principal_axis(&self) -> [T; 2] {
        // angle of the major axis: tan(2φ) = 2xy / (xx − yy)
        let phi = Float::atan2(T::lit(2.0) * self.xy, self.xx - self.yy) * T::lit(0.5);
        let (s, c) = Float::sin_cos(phi);
        if c < T::zero() {
            [-c, -s]
        } else {
            [c, s]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }
}

/// Dispersivities of the velocity-dependent dispersion tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionParams<T> {
    /// Longitudinal dispersivity.
    pub alpha_l: T,
    /// Transverse dispersivity.
    pub alpha_t: T,
    /// Molecular diffusion floor.
    pub d_m: T,
    /// Lower bound on the speed used in the `1/‖v‖` term.
    pub eps_v: T,
}

impl<T: Real> DispersionParams<T> {
    pub fn new(alpha_l: T, alpha_t: T, d_m: T) -> Result<Self> {
        let p = Self {
            alpha_l,
            alpha_t,
            d_m,
            eps_v: T::lit(1e-8),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Input(m.to_string()));
        if !(self.alpha_t >= T::zero()) {
            return bad("transverse dispersivity must be >= 0");
        }
        if !(self.alpha_l >= self.alpha_t) {
            return bad("longitudinal dispersivity must be >= transverse dispersivity");
        }
        if !(self.d_m >= T::zero()) {
            return bad("molecular diffusion must be >= 0");
        }
        if !(self.eps_v > T::zero()) {
            return bad("velocity regulariser must be > 0");
        }
        Ok(())
    }
}

/// `D = D_m I + α_T s I + (α_L − α_T)/s · v⊗v` with `s = max(‖v‖, ε_v)`.
pub fn dispersion_tensor<S: Scalar>(v: [S; 2], params: &DispersionParams<S::Real>) -> SymTensor2<S> {
    let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let s = if speed.value() > params.eps_v {
        speed
    } else {
        S::from_real(params.eps_v)
    };
    let iso = s.scale(params.alpha_t).shift(params.d_m);
    let k = S::from_real(params.alpha_l - params.alpha_t) / s;
    SymTensor2::new(iso + k * v[0] * v[0], k * v[0] * v[1], iso + k * v[1] * v[1])
}

/// Principal directions and magnitudes of a constant anisotropic tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnisotropyTensorSpec<T> {
    pub theta: T,
    pub lambda1: T,
    pub lambda2: T,
}

/// `R · diag(λ1, λ2) · Rᵀ` with `R = [[cos θ, sin θ], [−sin θ, cos θ]]`.
///
/// With this rotation the λ1 eigenvector is `(cos θ, −sin θ)`, i.e. the major
/// axis lies at angle `−θ`.
pub fn rotated_anisotropy<T: Real>(spec: &AnisotropyTensorSpec<T>) -> Result<SymTensor2<T>> {
    if !(spec.lambda1 > T::zero() && spec.lambda2 > T::zero()) {
        return Err(Error::Input("anisotropy eigenvalues must be > 0".into()));
    }
    let (s, c) = Float::sin_cos(spec.theta);
    let (l1, l2) = (spec.lambda1, spec.lambda2);
    Ok(SymTensor2::new(
        c * c * l1 + s * s * l2,
        -c * s * (l1 - l2),
        s * s * l1 + c * c * l2,
    ))
}

/// A tensor and its divergence `(∂x D_xx + ∂y D_xy, ∂x D_xy + ∂y D_yy)` at a
/// point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorSample<T> {
    pub tensor: SymTensor2<T>,
    pub divergence: [T; 2],
}

impl<T: Real> TensorSample<T> {
    pub fn constant(tensor: SymTensor2<T>) -> Self {
        Self {
            tensor,
            divergence: [T::zero(); 2],
        }
    }

    pub fn from_jets(d: &SymTensor2<Jet2<T>>) -> Self {
        Self {
            tensor: d.value(),
            divergence: [
                d.xx.grad[0] + d.xy.grad[1],
                d.xy.grad[0] + d.yy.grad[1],
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn dispersion_along_x() {
        let p = DispersionParams::new(1.0, 1e-5, 0.0).unwrap();
        let d = dispersion_tensor([1.0, 0.0], &p);
        assert!(close(d.xx, 1.0, 1e-15));
        assert_eq!(d.xy, 0.0);
        assert!(close(d.yy, 1e-5, 1e-15));
    }

    #[test]
    fn dispersion_at_rest_is_floor() {
        let p = DispersionParams::new(1.0, 0.1, 0.25).unwrap();
        let d = dispersion_tensor([0.0, 0.0], &p);
        assert!(close(d.xx, 0.25, 1e-7));
        assert!(close(d.yy, 0.25, 1e-7));
        assert!(d.xy.abs() < 1e-12);
    }

    #[test]
    fn dispersion_pure_longitudinal() {
        let p = DispersionParams::new(1.0, 0.0, 0.0).unwrap();
        let d = dispersion_tensor([3.0, 4.0], &p);
        assert!(close(d.xx, 9.0 / 5.0, 1e-15));
        assert!(close(d.xy, 12.0 / 5.0, 1e-15));
        assert!(close(d.yy, 16.0 / 5.0, 1e-15));
    }

    #[test]
    fn dispersion_rejects_bad_params() {
        assert!(DispersionParams::new(1.0, -1.0, 0.0).is_err());
        assert!(DispersionParams::new(0.1, 1.0, 0.0).is_err());
        assert!(DispersionParams::new(1.0, 0.1, -1e-3).is_err());
    }

    #[test]
    fn rotation_special_angles() {
        let d0 = rotated_anisotropy(&AnisotropyTensorSpec { theta: 0.0, lambda1: 5.0, lambda2: 2.0 }).unwrap();
        assert_eq!((d0.xx, d0.xy, d0.yy), (5.0, 0.0, 2.0));
        let d90 = rotated_anisotropy(&AnisotropyTensorSpec { theta: PI / 2.0, lambda1: 5.0, lambda2: 2.0 }).unwrap();
        assert!(close(d90.xx, 2.0, 1e-15) && close(d90.yy, 5.0, 1e-15) && d90.xy.abs() < 1e-15);
    }

    #[test]
    fn rotation_thirty_degrees() {
        let d = rotated_anisotropy(&AnisotropyTensorSpec { theta: PI / 6.0, lambda1: 1e4, lambda2: 1.0 }).unwrap();
        assert!(close(d.xx, 7500.25, 1e-14));
        assert!(close(d.yy, 2500.75, 1e-14));
        // −(√3/4)·9999
        assert!(close(d.xy, -4329.694006220301, 1e-13));
        let [l1, l2] = d.eigenvalues();
        assert!(close(l1, 1e4, 1e-12) && close(l2, 1.0, 1e-9));
        let axis = d.principal_axis();
        let angle = axis[1].atan2(axis[0]);
        assert!((angle + PI / 6.0).abs() < 1e-12, "major axis at {angle}");
    }

    #[test]
    fn tensor_divergence_from_jets() {
        // D = diag(x², xy): div = (2x, x)
        let [x, y] = Jet2::seed([0.7, 0.2]);
        let d = SymTensor2::new(x * x, Jet2::constant(0.0), x * y);
        let s = TensorSample::from_jets(&d);
        assert!(close(s.divergence[0], 1.4, 1e-15));
        assert!(close(s.divergence[1], 0.7, 1e-15));
    }
}
