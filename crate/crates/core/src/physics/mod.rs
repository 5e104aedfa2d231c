//! Pointwise PDE and boundary residuals.
//!
//! Every residual comes in two forms: a generic one over output jets (used to
//! build training losses, see [`crate::training`]) and a convenience wrapper
//! that evaluates a network at a point.
//!
//! Flow networks have three outputs `(v_x, v_y, p)`; concentration and
//! invariant networks have one.

mod tensor;

use std::fmt;
use std::sync::Arc;

use crate::autodiff::Jet2;
use crate::error::{Error, Result};
use crate::network::NetworkParams;
use crate::scalar::{Point2, Real, Scalar};

pub use tensor::{
    dispersion_tensor, rotated_anisotropy, AnisotropyTensorSpec, DispersionParams, SymTensor2,
    TensorSample,
};

/// Output slots of a flow network.
pub const VX: usize = 0;
pub const VY: usize = 1;
pub const PRESSURE: usize = 2;

pub type ScalarField<T> = Arc<dyn Fn(Point2<T>) -> T + Send + Sync>;

/// Fluid and permeability data for the Darcy system.
#[derive(Clone)]
pub struct MediumModel<T> {
    pub permeability: ScalarField<T>,
    pub viscosity: T,
    pub density: T,
    pub body_force: [T; 2],
}

impl<T: Real> fmt::Debug for MediumModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MediumModel")
            .field("viscosity", &self.viscosity)
            .field("density", &self.density)
            .field("body_force", &self.body_force)
            .finish_non_exhaustive()
    }
}

impl<T: Real> MediumModel<T> {
    /// Unit viscosity and density, no body force.
    pub fn new(permeability: impl Fn(Point2<T>) -> T + Send + Sync + 'static) -> Self {
        Self {
            permeability: Arc::new(permeability),
            viscosity: T::one(),
            density: T::one(),
            body_force: [T::zero(); 2],
        }
    }

    pub fn homogeneous(k: T) -> Self {
        Self::new(move |_| k)
    }

    /// Permeability at `x`, rejecting non-positive values.
    pub fn permeability_at(&self, x: Point2<T>) -> Result<T> {
        let k = (self.permeability)(x);
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::Medium(format!(
                "permeability {k} at ({}, {}) must be positive",
                x[0], x[1]
            )));
        }
        if !(self.viscosity > T::zero()) {
            return Err(Error::Medium("viscosity must be positive".into()));
        }
        Ok(k)
    }
}

/// Residual of the Darcy system at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowResidual<S> {
    pub momentum: [S; 2],
    pub mass: S,
}

impl<S: Scalar> FlowResidual<S> {
    pub fn squared_norm(&self) -> S {
        self.momentum[0] * self.momentum[0] + self.momentum[1] * self.momentum[1] + self.mass * self.mass
    }
}

/// `μ k⁻¹ v + ∇p − ρ b` and `∇·v` from flow output jets.
pub fn darcy_residual_jets<S: Scalar>(
    out: &[Jet2<S>],
    k: S::Real,
    medium: &MediumModel<S::Real>,
) -> FlowResidual<S> {
    let drag = medium.viscosity / k;
    let (vx, vy, p) = (&out[VX], &out[VY], &out[PRESSURE]);
    let rb = |i: usize| medium.density * medium.body_force[i];
    FlowResidual {
        momentum: [
            vx.value.scale(drag) + p.grad[0].shift(-rb(0)),
            vy.value.scale(drag) + p.grad[1].shift(-rb(1)),
        ],
        mass: vx.grad[0] + vy.grad[1],
    }
}

pub fn darcy_residual<T: Real>(
    flow_net: &NetworkParams<T>,
    x: Point2<T>,
    medium: &MediumModel<T>,
) -> Result<FlowResidual<T>> {
    let k = medium.permeability_at(x)?;
    Ok(darcy_residual_jets(&flow_net.eval_jets(x), k, medium))
}

pub fn pressure_mismatch<S: Scalar>(out: &[Jet2<S>], prescribed: S::Real) -> S {
    out[PRESSURE].value.shift(-prescribed)
}

/// `p(x_b) − p_prescribed`.
pub fn pressure_bc_residual<T: Real>(flow_net: &NetworkParams<T>, x_b: Point2<T>, prescribed: T) -> T {
    flow_net.eval(x_b)[PRESSURE] - prescribed
}

pub fn normal_velocity_mismatch<S: Scalar>(out: &[Jet2<S>], normal: [S::Real; 2], prescribed: S::Real) -> S {
    (out[VX].value.scale(normal[0]) + out[VY].value.scale(normal[1])).shift(-prescribed)
}

/// `v(x_b)·n − v_prescribed`.
pub fn normal_velocity_bc_residual<T: Real>(
    flow_net: &NetworkParams<T>,
    x_b: Point2<T>,
    normal: [T; 2],
    prescribed: T,
) -> T {
    let out = flow_net.eval(x_b);
    out[VX] * normal[0] + out[VY] * normal[1] - prescribed
}

/// `−div(D ∇c) − f` from the concentration jet, expanded as
/// `−(D : ∇∇c + (div D)·∇c) − f`.
pub fn diffusion_residual_jet<S: Scalar>(c: &Jet2<S>, d: &TensorSample<S::Real>, f: S::Real) -> S {
    let t = &d.tensor;
    let second = c.hess[0][0].scale(t.xx)
        + c.hess[0][1].scale(t.xy + t.xy)
        + c.hess[1][1].scale(t.yy);
    let first = c.grad[0].scale(d.divergence[0]) + c.grad[1].scale(d.divergence[1]);
    (-(second + first)).shift(-f)
}

/// A tensor field evaluated over coordinate jets, so its derivatives are
/// available for the divergence term.
pub trait TensorField<T: Real> {
    fn tensor(&self, x: [Jet2<T>; 2]) -> SymTensor2<Jet2<T>>;

    fn sample(&self, x: Point2<T>) -> TensorSample<T> {
        TensorSample::from_jets(&self.tensor(Jet2::seed(x)))
    }
}

impl<T: Real> TensorField<T> for SymTensor2<T> {
    fn tensor(&self, _: [Jet2<T>; 2]) -> SymTensor2<Jet2<T>> {
        self.map(Jet2::constant)
    }
}

impl<T: Real, F> TensorField<T> for F
where
    F: Fn([Jet2<T>; 2]) -> SymTensor2<Jet2<T>>,
{
    fn tensor(&self, x: [Jet2<T>; 2]) -> SymTensor2<Jet2<T>> {
        self(x)
    }
}

pub fn diffusion_residual<T: Real>(
    c_net: &NetworkParams<T>,
    x: Point2<T>,
    d_field: &impl TensorField<T>,
    f: impl Fn(Point2<T>) -> T,
) -> T {
    let c = c_net.eval_jets(x)[0];
    diffusion_residual_jet(&c, &d_field.sample(x), f(x))
}

/// `−n·(D ∇c) − flux_prescribed` from the concentration jet.
pub fn flux_mismatch<S: Scalar>(c: &Jet2<S>, normal: [S::Real; 2], d: &SymTensor2<S::Real>, prescribed: S::Real) -> S {
    let qx = c.grad[0].scale(d.xx) + c.grad[1].scale(d.xy);
    let qy = c.grad[0].scale(d.xy) + c.grad[1].scale(d.yy);
    (-(qx.scale(normal[0]) + qy.scale(normal[1]))).shift(-prescribed)
}

pub fn neumann_flux_residual<T: Real>(
    c_net: &NetworkParams<T>,
    x_b: Point2<T>,
    normal: [T; 2],
    d_field: &impl TensorField<T>,
    prescribed: T,
) -> T {
    let c = c_net.eval_jets(x_b)[0];
    flux_mismatch(&c, normal, &d_field.sample(x_b).tensor, prescribed)
}

pub fn value_mismatch<S: Scalar>(c: &Jet2<S>, prescribed: S::Real) -> S {
    c.value.shift(-prescribed)
}

/// Permeability layouts of the three patch tests on the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatchTest {
    /// `k1` on the left half, `k2` on the right.
    Vertical,
    /// `k1` on the bottom half, `k2` on the top.
    Horizontal,
    /// `k1` above the main diagonal, `k2` below.
    Inclined,
}

impl PatchTest {
    pub fn name(self) -> &'static str {
        match self {
            PatchTest::Vertical => "vertical",
            PatchTest::Horizontal => "horizontal",
            PatchTest::Inclined => "inclined",
        }
    }

    /// Signed distance-like coordinate: negative on the `k1` side, zero on
    /// the interface.
    pub fn interface_coordinate<T: Real>(self, x: Point2<T>) -> T {
        let half = T::lit(0.5);
        match self {
            PatchTest::Vertical => x[0] - half,
            PatchTest::Horizontal => x[1] - half,
            PatchTest::Inclined => (x[0] - x[1]) * T::FRAC_1_SQRT_2(),
        }
    }
}

/// Piecewise-constant permeability; interface points take `k2`.
pub fn patch_permeability<T: Real>(test: PatchTest, k1: T, k2: T, x: Point2<T>) -> T {
    if test.interface_coordinate(x) < T::zero() {
        k1
    } else {
        k2
    }
}

/// Mode amplitudes of the explicit velocity field: `(p_i, q_i, A_i)`.
pub const EXPLICIT_VELOCITY_MODES: [(f64, f64, f64); 3] = [(4.0, 1.0, 0.08), (5.0, 5.0, 0.02), (10.0, 10.0, 0.01)];

/// Divergence-free perturbation of a unit flow in the x direction on a
/// `lengths[0] × lengths[1]` box.
pub fn explicit_velocity<S: Scalar>(x: [S; 2], lengths: [S::Real; 2]) -> [S; 2] {
    let pi = <S::Real as num_traits::FloatConst>::PI();
    let half_pi = pi * <S::Real as Real>::lit(0.5);
    let mut vx = S::lit(1.0);
    let mut vy = S::zero();
    for &(p, q, a) in &EXPLICIT_VELOCITY_MODES {
        let lit = <S::Real as Real>::lit;
        let (p, q, a) = (lit(p), lit(q), lit(a));
        let kx = p * pi / lengths[0];
        let ky = q * pi / lengths[1];
        let phase = x[0].scale(kx).shift(-half_pi);
        let arg_y = x[1].scale(ky);
        vx = vx + (phase.cos() * arg_y.cos()).scale(a * ky);
        vy = vy + (phase.sin() * arg_y.sin()).scale(a * kx);
    }
    [vx, vy]
}
