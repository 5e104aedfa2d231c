//! Constraint sets of the flow and diffusion problems.

use crate::error::{Error, Result};
use crate::geometry::{BcKind, BcSpec, CollocationSet};
use crate::physics::{MediumModel, TensorSample};
use crate::scalar::{Point2, Real};

use super::{ConstraintSet, DarcyForm, DiffusionForm, FluxForm, NormalVelocityForm, PressureForm, TermKind, ValueForm};

/// Darcy residuals at every interior point, pressure or normal-velocity
/// mismatches on the boundary. Three network outputs.
pub fn flow_constraints<T: Real>(
    set: &CollocationSet<T>,
    medium: &MediumModel<T>,
    bc: &BcSpec<T>,
) -> Result<ConstraintSet<T>> {
    let mut out = ConstraintSet::new(3);
    for &x in &set.interior {
        let k = medium.permeability_at(x)?;
        out.push(x, TermKind::Pde, &DarcyForm { medium, k })?;
    }
    for b in &set.boundary {
        let kind = TermKind::Boundary(b.segment);
        match bc.resolve(b)? {
            (BcKind::Pressure, v) => out.push(b.x, kind, &PressureForm(v))?,
            (BcKind::NormalVelocity, v) => out.push(
                b.x,
                kind,
                &NormalVelocityForm {
                    normal: b.normal,
                    value: v,
                },
            )?,
            (other, _) => return Err(Error::config(format!("{other:?} condition on a flow network"))),
        }
    }
    Ok(out)
}

/// `−div(D ∇c) = f` inside, Dirichlet or flux conditions on the boundary. One
/// network output.
pub fn diffusion_constraints<T: Real>(
    set: &CollocationSet<T>,
    d_field: impl Fn(Point2<T>) -> Result<TensorSample<T>>,
    source: impl Fn(Point2<T>) -> T,
    bc: &BcSpec<T>,
) -> Result<ConstraintSet<T>> {
    let mut out = ConstraintSet::new(1);
    for &x in &set.interior {
        let d = d_field(x)?;
        out.push(x, TermKind::Pde, &DiffusionForm { d, f: source(x) })?;
    }
    for b in &set.boundary {
        let kind = TermKind::Boundary(b.segment);
        match bc.resolve(b)? {
            (BcKind::Concentration, v) => out.push(b.x, kind, &ValueForm(v))?,
            (BcKind::Flux, v) => {
                let d = d_field(b.x)?.tensor;
                out.push(
                    b.x,
                    kind,
                    &FluxForm {
                        normal: b.normal,
                        d,
                        value: v,
                    },
                )?
            }
            (other, _) => return Err(Error::config(format!("{other:?} condition on a concentration network"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{flow_bc_vertical_patch, unit_square_grid};
    use crate::network::batched::BatchEngine;
    use crate::network::NetworkParams;
    use crate::physics::SymTensor2;
    use crate::training::LossWeights;
    use ndarray::array;

    #[test]
    fn exact_homogeneous_flow_has_zero_loss() {
        let set = unit_square_grid::<f64>(12).unwrap();
        let c = flow_constraints(&set, &MediumModel::homogeneous(1.0), &flow_bc_vertical_patch()).unwrap();
        // v = (1, 0), p = 1 − x
        let net = NetworkParams::from_layers(
            vec![array![[0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]],
            vec![array![1.0, 0.0, 1.0]],
        )
        .unwrap();
        let l = c
            .assemble_loss(&net, &LossWeights::default(), &mut BatchEngine::new(), None)
            .unwrap();
        assert!(l.total < 1e-28, "{l:?}");
        assert_eq!(c.interior_len(), 100);
        assert_eq!(c.boundary_len(), 44);
    }

    #[test]
    fn flow_rejects_concentration_bc() {
        let set = unit_square_grid::<f64>(4).unwrap();
        let bc = BcSpec::new()
            .constant(crate::geometry::Segment::Left, BcKind::Concentration, 1.0)
            .constant(crate::geometry::Segment::Right, BcKind::Pressure, 0.0)
            .constant(crate::geometry::Segment::Top, BcKind::Pressure, 0.0)
            .constant(crate::geometry::Segment::Bottom, BcKind::Pressure, 0.0);
        assert!(flow_constraints(&set, &MediumModel::homogeneous(1.0), &bc).is_err());
    }

    #[test]
    fn linear_concentration_solves_laplace() {
        use crate::geometry::Segment::*;
        let set = unit_square_grid::<f64>(9).unwrap();
        let bc = BcSpec::new()
            .constant(Left, BcKind::Concentration, 1.0)
            .constant(Right, BcKind::Concentration, 0.0)
            .constant(Top, BcKind::Flux, 0.0)
            .constant(Bottom, BcKind::Flux, 0.0);
        let d = SymTensor2::diag(2.0, 0.5);
        let c = diffusion_constraints(&set, |_| Ok(TensorSample::constant(d)), |_| 0.0, &bc).unwrap();
        let net = NetworkParams::from_layers(vec![array![[-1.0, 0.0]]], vec![array![1.0]]).unwrap();
        let l = c
            .assemble_loss(&net, &LossWeights::default(), &mut BatchEngine::new(), None)
            .unwrap();
        assert!(l.total < 1e-28);
        // flipping the flux condition sign convention would show up here
        let tilted = NetworkParams::from_layers(vec![array![[-1.0, 0.1]]], vec![array![1.0]]).unwrap();
        let res = c.boundary_residuals(&tilted);
        let top = set.boundary.iter().position(|b| b.segment == Top).unwrap();
        assert!((res[top][0] - (-0.5 * 0.1)).abs() < 1e-15);
    }
}
