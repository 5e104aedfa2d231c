//! Residual forms of the physics operators, ready for [`ConstraintSet`].
//!
//! [`ConstraintSet`]: super::ConstraintSet

use crate::autodiff::Jet2;
use crate::physics::{
    darcy_residual_jets, diffusion_residual_jet, flux_mismatch, normal_velocity_mismatch, pressure_mismatch,
    value_mismatch, MediumModel, SymTensor2, TensorSample,
};
use crate::scalar::{Real, Scalar};

use super::PointResidual;

/// Darcy momentum (two components) and mass balance at a point of
/// permeability `k`.
pub struct DarcyForm<'a, T> {
    pub medium: &'a MediumModel<T>,
    pub k: T,
}

impl<T: Real> PointResidual<T> for DarcyForm<'_, T> {
    fn components(&self) -> usize {
        3
    }
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]) {
        let r = darcy_residual_jets(out, self.k, self.medium);
        res[0] = r.momentum[0];
        res[1] = r.momentum[1];
        res[2] = r.mass;
    }
}

pub struct PressureForm<T>(pub T);

impl<T: Real> PointResidual<T> for PressureForm<T> {
    fn components(&self) -> usize {
        1
    }
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]) {
        res[0] = pressure_mismatch(out, self.0);
    }
}

pub struct NormalVelocityForm<T> {
    pub normal: [T; 2],
    pub value: T,
}

impl<T: Real> PointResidual<T> for NormalVelocityForm<T> {
    fn components(&self) -> usize {
        1
    }
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]) {
        res[0] = normal_velocity_mismatch(out, self.normal, self.value);
    }
}

/// `−div(D ∇c) − f` for a single-output network.
pub struct DiffusionForm<T> {
    pub d: TensorSample<T>,
    pub f: T,
}

impl<T: Real> PointResidual<T> for DiffusionForm<T> {
    fn components(&self) -> usize {
        1
    }
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]) {
        res[0] = diffusion_residual_jet(&out[0], &self.d, self.f);
    }
}

/// Dirichlet value of a single-output network.
pub struct ValueForm<T>(pub T);

impl<T: Real> PointResidual<T> for ValueForm<T> {
    fn components(&self) -> usize {
        1
    }
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]) {
        res[0] = value_mismatch(&out[0], self.0);
    }
}

pub struct FluxForm<T> {
    pub normal: [T; 2],
    pub d: SymTensor2<T>,
    pub value: T,
}

impl<T: Real> PointResidual<T> for FluxForm<T> {
    fn components(&self) -> usize {
        1
    }
    fn residual<S: Scalar<Real = T>>(&self, out: &[Jet2<S>], res: &mut [S]) {
        res[0] = flux_mismatch(&out[0], self.normal, &self.d, self.value);
    }
}
