//! Experiment orchestration for `pqs-core`: two-axis sweeps, seeded
//! analytic-versus-simulation verification, state dumps and named
//! operating points. The `pqs` binary is a thin CLI over these.

pub mod config;
pub mod dump;
mod error;
pub mod spot;
pub mod sweep;
pub mod verify;

pub use error::{HarnessError, Result};
