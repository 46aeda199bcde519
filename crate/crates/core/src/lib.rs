//! Extreme eigenvalues of the Gaussian Unitary Ensemble.
//!
//! The joint distribution of the smallest and largest eigenvalue of the
//! n×n GUE is a Fredholm determinant of a 2×2 operator matrix built from
//! the Hermite kernel. This crate evaluates such determinants with a
//! Gauss–Legendre Nyström discretization, derives the Tracy–Widom law from
//! the Airy kernel, computes the covariance and correlation of the extremes,
//! and cross-checks everything against Monte Carlo sampling.
//!
//! Module layout, bottom up:
//!
//! * [`specfun`]: Airy function and Hermite functions.
//! * [`quadrature`]: Gauss–Legendre rules and truncated half-lines.
//! * [`kernels`]: Christoffel–Darboux, edge-scaled and Airy kernels.
//! * [`fredholm`]: discretized operators and their determinants.
//! * [`distributions`]: Tracy–Widom, finite-n marginals and joint CDF.
//! * [`moments`]: moments, covariance and correlation.
//! * [`montecarlo`]: random matrix sampling.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod distributions;
mod error;
pub mod fredholm;
pub mod kernels;
pub mod moments;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
