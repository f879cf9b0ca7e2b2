//! Polyhedral Markov fields in three dimensions.
//!
//! Configurations are built by sweeping a spatial plane through a time-space
//! domain and evolving the planar sections of faces (multi-edges) under
//! birth, collision and extinction rules. The same configurations carry a
//! Gibbs energy, and a birth-site jump chain samples Gibbsian modifications.

pub mod error;
pub mod evolution;
pub mod export;
pub mod fieldmodel;
pub mod geometry;
pub mod kinematics;
pub mod sampler;
pub mod stochgeom;
pub mod verify;

pub use error::{Error, Result};

/// Library version, embedded in output files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
