//! Physics-informed collocation networks for Darcy flow, anisotropic
//! diffusion and fast bimolecular reactions in porous media.
//!
//! The numerical core is generic over the floating point type (`f32` or
//! `f64`); the aliases below fix it to `f64`, which the benchmark cases use.

pub mod autodiff;
pub mod cases;
pub mod error;
pub mod geometry;
pub mod io;
pub mod network;
pub mod oracle;
pub mod physics;
pub mod reaction;
pub mod scalar;
pub mod training;

pub use error::{Error, Result};

pub type Jet = autodiff::Jet2<f64>;
pub type Network = network::NetworkParams<f64>;
pub type Collocation = geometry::CollocationSet<f64>;
pub type Boundary = geometry::BcSpec<f64>;
pub type Medium = physics::MediumModel<f64>;
pub type Tensor = physics::SymTensor2<f64>;
pub type Constraints = training::ConstraintSet<f64>;
pub type Record = training::TrainRecord<f64>;
pub type Field = oracle::FieldGrid<f64>;
pub type Reaction = reaction::ReactionSystem<f64>;
