//! Special functions: the Airy function Ai with its derivative, and the
//! orthonormal Hermite functions.
//!
//! Everything here is a pure function of its arguments.

mod airy;
mod dd;
mod hermite;

pub use airy::{airy, AiryPair};
pub use hermite::{hermite_phi, plancherel_rotach_check, HermiteEval, MAX_HERMITE_DEGREE};

/// De-scaled magnitudes below this are reported as exact zero.
pub const UNDERFLOW_CUTOFF: f64 = 1e-300;
