//! Finite-time holonomic gates on a four-level tripod system under
//! parametric noise.
//!
//! The crate builds the tripod Hamiltonian, drives it around
//! meridian–equator–meridian loops on the parameter sphere (optionally
//! perturbed by one of several noise models), integrates the time-ordered
//! propagator and scores the resulting noise-averaged channel against the
//! ideal holonomy with the average gate fidelity. [`experiments`] binds
//! these pieces into reproducible, seeded parameter sweeps.

pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod path;
pub mod propagator;
pub mod rng;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::CMat;
pub use model::ParamPoint;
pub use noise::{NoiseModel, NoiseRealization};
pub use path::PathSpec;
pub use propagator::{EvolutionConfig, Propagator, SamplingRule};
