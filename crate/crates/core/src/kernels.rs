//! Kernels of the determinantal point processes.
//!
//! * `K_n(ξ,η) = Σ_{k<n} φ_k(ξ)φ_k(η)`, evaluated through its
//!   Christoffel–Darboux form
//!   `½(φ_n(ξ)φ_n'(η) - φ_n'(ξ)φ_n(η))/(ξ-η) - ½φ_n(ξ)φ_n(η)`.
//! * The four edge-scaled blocks `K_ij^(n)(ξ,η) = c K_n(±(√(2n) + cξ), ±(√(2n) + cη))`
//!   with `c = 2^(-1/2) n^(-1/6)`; the first index picks the sign of the
//!   row argument, the second that of the column argument (1 = lower edge).
//! * The Airy kernel `(Ai(ξ)Ai'(η) - Ai'(ξ)Ai(η))/(ξ-η)`.
//!
//! All of them have the integrable form `(a(ξ)b(η) - b(ξ)a(η))/(ξ-η) + ...`
//! so a kernel is sampled once per quadrature node ([`KernelSample`]) and
//! matrix entries are combined from pairs of samples.

use crate::specfun::{airy, hermite_phi};
use crate::Result;
use std::f64::consts::FRAC_1_SQRT_2;

/// Below this separation of the native arguments the ratio form is replaced
/// by the analytic diagonal with a first-order correction.
pub const NEAR_DIAGONAL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    B11,
    B12,
    B21,
    B22,
}

impl Block {
    fn signs(self) -> (f64, f64) {
        match self {
            Block::B11 => (-1.0, -1.0),
            Block::B12 => (-1.0, 1.0),
            Block::B21 => (1.0, -1.0),
            Block::B22 => (1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelSpec {
    /// Unscaled Christoffel–Darboux kernel `K_n`.
    HermiteCD {
        n: usize,
    },
    /// Edge-scaled block `K_ij^(n)`.
    EdgeScaled {
        n: usize,
        block: Block,
    },
    Airy,
}

/// A kernel's ingredients at one point, in the kernel's native variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    /// Native argument: `λ` for Hermite kernels, `ξ` for the Airy kernel.
    pub point: f64,
    /// `φ_n(λ)` or `Ai(ξ)`.
    pub a: f64,
    /// `φ_n'(λ)` or `Ai'(ξ)`.
    pub b: f64,
}

fn edge_scale(n: usize) -> f64 {
    FRAC_1_SQRT_2 * (n as f64).powf(-1.0 / 6.0)
}

fn hermite_sample(n: usize, lambda: f64) -> Result<KernelSample> {
    let h = hermite_phi(n, lambda)?;
    Ok(KernelSample {
        point: lambda,
        a: h.true_value(),
        b: h.true_derivative(),
    })
}

fn airy_sample(xi: f64) -> Result<KernelSample> {
    let p = airy(xi)?;
    Ok(KernelSample {
        point: xi,
        a: p.ai,
        b: p.ai_prime,
    })
}

fn hermite_diag_from(n: usize, s: &KernelSample) -> f64 {
    // φ'' = (λ² - 2n - 1) φ gives K_n(λ,λ) = ½φ'² + (n - λ²/2) φ².
    0.5 * s.b * s.b + (n as f64 - 0.5 * s.point * s.point) * s.a * s.a
}

fn hermite_diag_slope(s: &KernelSample) -> f64 {
    -s.a * s.b - s.point * s.a * s.a
}

fn airy_diag_from(s: &KernelSample) -> f64 {
    s.b * s.b - s.point * s.a * s.a
}

fn airy_diag_slope(s: &KernelSample) -> f64 {
    -s.a * s.a
}

/// Symmetric first-order blend of the diagonal values at both ends.
fn near_diagonal(d1: f64, d2: f64, slope1: f64, slope2: f64, delta: f64) -> f64 {
    0.5 * (d1 + d2) + 0.25 * delta * (slope1 - slope2)
}

fn combine_hermite(n: usize, r: &KernelSample, c: &KernelSample) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let delta = c.point - r.point;
    if delta.abs() < NEAR_DIAGONAL {
        near_diagonal(
            hermite_diag_from(n, r),
            hermite_diag_from(n, c),
            hermite_diag_slope(r),
            hermite_diag_slope(c),
            delta,
        )
    } else {
        0.5 * (r.a * c.b - r.b * c.a) / (r.point - c.point) - 0.5 * r.a * c.a
    }
}

fn combine_airy(r: &KernelSample, c: &KernelSample) -> f64 {
    let delta = c.point - r.point;
    if delta.abs() < NEAR_DIAGONAL {
        near_diagonal(
            airy_diag_from(r),
            airy_diag_from(c),
            airy_diag_slope(r),
            airy_diag_slope(c),
            delta,
        )
    } else {
        (r.a * c.b - r.b * c.a) / (r.point - c.point)
    }
}

impl KernelSpec {
    pub fn description(&self) -> String {
        match self {
            KernelSpec::HermiteCD { n } => format!("Christoffel-Darboux kernel K_{n}"),
            KernelSpec::EdgeScaled { n, block } => {
                let tag = match block {
                    Block::B11 => "11",
                    Block::B12 => "12",
                    Block::B21 => "21",
                    Block::B22 => "22",
                };
                format!("edge-scaled block K_{tag} of K_{n}")
            }
            KernelSpec::Airy => "Airy kernel".to_string(),
        }
    }

    /// True when `K(ξ,η) = K(η,ξ)` for this kernel on its own.
    pub fn is_symmetric(&self) -> bool {
        match self {
            KernelSpec::EdgeScaled { block, .. } => matches!(block, Block::B11 | Block::B22),
            _ => true,
        }
    }

    /// Prefactor applied to combined samples.
    fn prefactor(&self) -> f64 {
        match self {
            KernelSpec::EdgeScaled { n, .. } => edge_scale(*n),
            _ => 1.0,
        }
    }

    fn native(&self, x: f64, sign: f64) -> f64 {
        match self {
            KernelSpec::EdgeScaled { n, .. } => {
                sign * ((2.0 * *n as f64).sqrt() + edge_scale(*n) * x)
            }
            _ => x,
        }
    }

    fn sample_with_sign(&self, x: f64, sign: f64) -> Result<KernelSample> {
        let p = self.native(x, sign);
        match self {
            KernelSpec::HermiteCD { n } | KernelSpec::EdgeScaled { n, .. } => hermite_sample(*n, p),
            KernelSpec::Airy => airy_sample(p),
        }
    }

    /// Sample for the first (row) argument.
    pub fn row_sample(&self, x: f64) -> Result<KernelSample> {
        let sign = match self {
            KernelSpec::EdgeScaled { block, .. } => block.signs().0,
            _ => 1.0,
        };
        self.sample_with_sign(x, sign)
    }

    /// Sample for the second (column) argument.
    pub fn col_sample(&self, x: f64) -> Result<KernelSample> {
        let sign = match self {
            KernelSpec::EdgeScaled { block, .. } => block.signs().1,
            _ => 1.0,
        };
        self.sample_with_sign(x, sign)
    }

    /// Kernel value from a row sample and a column sample.
    pub fn combine(&self, row: &KernelSample, col: &KernelSample) -> f64 {
        match self {
            KernelSpec::HermiteCD { n } => combine_hermite(*n, row, col),
            KernelSpec::EdgeScaled { n, .. } => self.prefactor() * combine_hermite(*n, row, col),
            KernelSpec::Airy => combine_airy(row, col),
        }
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Result<f64> {
        Ok(self.combine(&self.row_sample(xi)?, &self.col_sample(eta)?))
    }
}

/// `K_n(ξ,η)`.
pub fn hermite_kernel(n: usize, xi: f64, eta: f64) -> Result<f64> {
    KernelSpec::HermiteCD { n }.eval(xi, eta)
}

/// `K_n(λ,λ)`, returning 0 on argument errors (used for cutoff searches).
pub fn hermite_kernel_diag(n: usize, lambda: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    match hermite_sample(n, lambda) {
        Ok(s) => hermite_diag_from(n, &s),
        Err(_) => 0.0,
    }
}

/// `K_ij^(n)(ξ,η)`.
pub fn edge_scaled_kernel(n: usize, block: Block, xi: f64, eta: f64) -> Result<f64> {
    KernelSpec::EdgeScaled { n, block }.eval(xi, eta)
}

/// Airy kernel `K(ξ,η)`.
pub fn airy_kernel(xi: f64, eta: f64) -> Result<f64> {
    KernelSpec::Airy.eval(xi, eta)
}
