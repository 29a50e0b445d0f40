//! Truncated Fock-space simulation of heralded polarization-entanglement
//! preparation with polarized quantum scissors.
//!
//! * [`fock`]: sparse multimode polarized pure states and projective
//!   photon-number measurement.
//! * [`elements`]: beam splitters, polarizing beam splitters, half-wave
//!   plates and the type-II two-mode squeezer.
//! * [`sources`]: coherent, cat and entangled coherent input states, plus
//!   the target states of the preparations.
//! * [`scissors`]: the QS, PQS1 and PQS2 heralded truncation circuits.
//! * [`analytics`]: closed-form success probabilities and fidelities.

pub mod analytics;
pub mod elements;
mod error;
pub mod fock;
pub mod scissors;
pub mod sources;

pub use error::{Error, Result};
pub use fock::{coherent_tail_weight, Occupation, OccupationKey, ProjectionOutcome, PureState};
pub use num_complex::Complex64;

/// Largest tail weight tolerated when choosing a cutoff for coherent content.
pub const MAX_TAIL_WEIGHT: f64 = 1e-12;

/// Polarization of a photon or a polarization sub-mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn orthogonal(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }

    /// Occupation with `n` photons in this polarization and none in the other.
    pub fn occupation(self, n: u32) -> Occupation {
        match self {
            Polarization::H => Occupation::new(n, 0),
            Polarization::V => Occupation::new(0, n),
        }
    }

    pub fn count(self, occ: Occupation) -> u32 {
        match self {
            Polarization::H => occ.h,
            Polarization::V => occ.v,
        }
    }
}
