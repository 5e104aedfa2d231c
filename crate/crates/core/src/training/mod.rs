//! Loss assembly, Adam and the epoch loop.

mod adam;
mod constraint;
mod forms;
mod problems;
mod trainer;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Segment;
use crate::scalar::Real;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use constraint::{compile, AffineRow, ConstraintSet, LossBreakdown, PointResidual, TermKind};
pub use forms::{DarcyForm, DiffusionForm, FluxForm, NormalVelocityForm, PressureForm, ValueForm};
pub use problems::{diffusion_constraints, flow_constraints};
pub use trainer::{train, EarlyStop, EpochRecord, TrainAbort, TrainConfig, TrainRecord};

/// `total = λ_pde · L_PDE + Σ_boundary λ_segment · r² / n_boundary`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossWeights<T> {
    pub pde: T,
    pub bc: T,
    /// Per-segment replacements for `bc`.
    pub segments: BTreeMap<Segment, T>,
}

impl<T: Real> Default for LossWeights<T> {
    fn default() -> Self {
        Self::new(T::one(), T::lit(10.0))
    }
}

impl<T: Real> LossWeights<T> {
    pub fn new(pde: T, bc: T) -> Self {
        Self {
            pde,
            bc,
            segments: BTreeMap::new(),
        }
    }

    pub fn with_segment(mut self, segment: Segment, weight: T) -> Self {
        self.segments.insert(segment, weight);
        self
    }

    pub fn for_segment(&self, segment: Segment) -> T {
        self.segments.get(&segment).copied().unwrap_or(self.bc)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |w: T| w > T::zero() && w.is_finite();
        if !ok(self.pde) || !ok(self.bc) || !self.segments.values().all(|&w| ok(w)) {
            return Err(Error::config("loss weights must be positive and finite"));
        }
        Ok(())
    }
}
