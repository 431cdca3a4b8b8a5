//! Thermodynamics of a quantum harmonic oscillator strongly coupled to a
//! bosonic environment, described through its intrinsic Hamiltonian of mean
//! force.
//!
//! The environment is a reaction-coordinate oscillator damped by a Markovian
//! continuum. Everything is Gaussian, so the state of the system is carried
//! by first and second moments; [`focklab`] provides an independent
//! truncated-Fock oracle for the closed forms.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod dos;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod focklab;
pub mod gaussian;
pub mod model;
pub mod numerics;
pub mod thermo;

pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, GaussianState};
pub use model::{DressedMode, DrivingParams, MixingMatrix, ModelParams};
pub use numerics::{IltMethod, IltSpec, OdeSpec, QuadratureSpec};
