//! Linear state-space models of a plus-configuration quadcopter.
//!
//! The crate builds the 3DOF attitude model and the 6DOF hover-linearized
//! model from physical parameters, converts between rotor forces and
//! generalized inputs, analyses controllability and stability, simulates the
//! models (and a nonlinear reference plant), and designs stabilizing
//! pole-placement feedback.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod models;
pub mod params;
pub mod rotor_forces;
pub mod simulator;
pub mod stabilizer;

pub use error::{Error, Result};
pub use linalg::{Matrix, StateSpaceModel};
pub use params::QuadParams;
pub use rotor_forces::{GeneralizedInput, RotorForces};
