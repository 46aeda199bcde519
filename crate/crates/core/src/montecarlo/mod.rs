//! Monte Carlo sampling of the extreme eigenvalues of Hermitian random
//! matrices.
//!
//! GUE: diagonal entries `N(0, 1/2)`, off-diagonal real and imaginary parts
//! `N(0, 1/4)` each, giving the eigenvalue density
//! `∝ exp(-Σλ²) Π|λi - λj|²`. The uniform Wigner ensemble draws every real
//! degree of freedom from `U[-1, 1]`.
//!
//! Sample `i` of a run with seed `s` uses the ChaCha8 stream `i` of the
//! generator seeded with `s`, so results do not depend on the number of
//! worker threads.

mod tridiagonal;

pub use tridiagonal::{tridiagonalize, HermitianMatrix, SymTridiagonal};

use crate::{Error, Result};
use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Absolute bisection tolerance for the extreme eigenvalues.
pub const EIGEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EnsembleKind {
    Gue,
    UniformWigner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
}

impl EnsembleSpec {
    pub fn gue(n: usize) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::Gue,
            n,
        }
    }

    pub fn uniform(n: usize) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::UniformWigner,
            n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremePair {
    pub lam_min: f64,
    pub lam_max: f64,
}

/// Sample correlation with its large-sample standard error
/// `(1 - ρ²)/√N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleCorrelation {
    pub rho: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeConventionCheck {
    /// Sample mean of `2^(1/2) n^(1/6) (λmax - √(2n))`.
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on the open interval `(0, 1)` from the top 53 bits.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Draws the matrix of sample `index`.
pub fn sample_matrix(spec: EnsembleSpec, seed: u64, index: u64) -> HermitianMatrix {
    let mut rng = stream(seed, index);
    match spec.kind {
        EnsembleKind::Gue => {
            let diag = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
            let off = Normal::new(0.0, 0.5).expect("valid normal");
            HermitianMatrix::from_lower(spec.n, |i, j| {
                if i == j {
                    Complex64::new(diag.inverse_cdf(open_unit(&mut rng)), 0.0)
                } else {
                    let re = off.inverse_cdf(open_unit(&mut rng));
                    let im = off.inverse_cdf(open_unit(&mut rng));
                    Complex64::new(re, im)
                }
            })
        }
        EnsembleKind::UniformWigner => HermitianMatrix::from_lower(spec.n, |i, j| {
            let mut u = || 2.0 * open_unit(&mut rng) - 1.0;
            if i == j {
                Complex64::new(u(), 0.0)
            } else {
                let re = u();
                Complex64::new(re, u())
            }
        }),
    }
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn extreme_eigenvalues(a: &HermitianMatrix) -> ExtremePair {
    let t = tridiagonalize(a);
    let n = a.size();
    ExtremePair {
        lam_min: t.eigenvalue(0, EIGEN_TOL),
        lam_max: t.eigenvalue(n - 1, EIGEN_TOL),
    }
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!("n = {n} must be at least {min}")));
    }
    Ok(())
}

/// Extremes of one matrix drawn with `seed` (stream 0).
pub fn sample_extremes(spec: EnsembleSpec, seed: u64) -> Result<ExtremePair> {
    sample_extremes_scaled(spec, seed, 1.0)
}

/// As [`sample_extremes`] with every entry multiplied by `scale`.
pub fn sample_extremes_scaled(spec: EnsembleSpec, seed: u64, scale: f64) -> Result<ExtremePair> {
    check_n(spec.n, 2)?;
    Ok(draw(spec, seed, 0, scale))
}

fn draw(spec: EnsembleSpec, seed: u64, index: u64, scale: f64) -> ExtremePair {
    let a = sample_matrix(spec, seed, index);
    if scale == 1.0 {
        extreme_eigenvalues(&a)
    } else {
        extreme_eigenvalues(&a.scaled(scale))
    }
}

/// Extremes of `samples` independent draws, in sample order.
pub fn sample_pairs(
    spec: EnsembleSpec,
    samples: usize,
    seed: u64,
    scale: f64,
) -> Result<Vec<ExtremePair>> {
    check_n(spec.n, 2)?;
    Ok((0..samples as u64)
        .into_par_iter()
        .map(|i| draw(spec, seed, i, scale))
        .collect())
}

/// Pairwise sum; the split points depend only on the length.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Pearson correlation of the pairs.
pub fn pearson(pairs: &[ExtremePair]) -> f64 {
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.lam_min).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.lam_max).collect();
    let mx = pairwise_sum(&xs) / n;
    let my = pairwise_sum(&ys) / n;
    let dx: Vec<f64> = xs.iter().map(|x| x - mx).collect();
    let dy: Vec<f64> = ys.iter().map(|y| y - my).collect();
    let sxy = pairwise_sum(&dx.iter().zip(&dy).map(|(a, b)| a * b).collect::<Vec<_>>());
    let sxx = pairwise_sum(&dx.iter().map(|a| a * a).collect::<Vec<_>>());
    let syy = pairwise_sum(&dy.iter().map(|b| b * b).collect::<Vec<_>>());
    sxy / (sxx * syy).sqrt()
}

/// Sample correlation of `(λmin, λmax)` over `samples` draws.
pub fn sample_correlation(
    spec: EnsembleSpec,
    samples: usize,
    seed: u64,
) -> Result<SampleCorrelation> {
    sample_correlation_scaled(spec, samples, seed, 1.0)
}

pub fn sample_correlation_scaled(
    spec: EnsembleSpec,
    samples: usize,
    seed: u64,
    scale: f64,
) -> Result<SampleCorrelation> {
    if samples < 100 {
        return Err(Error::Domain(format!(
            "samples = {samples} must be at least 100"
        )));
    }
    let pairs = sample_pairs(spec, samples, seed, scale)?;
    let rho = pearson(&pairs);
    Ok(SampleCorrelation {
        rho,
        stderr: (1.0 - rho * rho) / (samples as f64).sqrt(),
        samples,
    })
}

/// Sample mean of the edge-scaled largest GUE eigenvalue.
pub fn edge_convention_check(samples: usize, n: usize, seed: u64) -> Result<EdgeConventionCheck> {
    edge_convention_check_scaled(samples, n, seed, 1.0)
}

pub fn edge_convention_check_scaled(
    samples: usize,
    n: usize,
    seed: u64,
    scale: f64,
) -> Result<EdgeConventionCheck> {
    check_n(n, 50)?;
    if samples < 2 {
        return Err(Error::Domain(
            "edge_convention_check needs at least 2 samples".into(),
        ));
    }
    let nf = n as f64;
    let pairs = sample_pairs(EnsembleSpec::gue(n), samples, seed, scale)?;
    let scaled: Vec<f64> = pairs
        .iter()
        .map(|p| 2f64.sqrt() * nf.powf(1.0 / 6.0) * (p.lam_max - (2.0 * nf).sqrt()))
        .collect();
    let mean = pairwise_sum(&scaled) / samples as f64;
    let var = pairwise_sum(
        &scaled
            .iter()
            .map(|v| (v - mean).powi(2))
            .collect::<Vec<_>>(),
    ) / (samples as f64 - 1.0);
    Ok(EdgeConventionCheck {
        mean,
        stderr: (var / samples as f64).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_invariance_n2() {
        for seed in 0..50 {
            let a = sample_matrix(EnsembleSpec::gue(2), seed, 0);
            let p = extreme_eigenvalues(&a);
            assert!((p.lam_min + p.lam_max - a.trace()).abs() < 1e-12);
            assert!(p.lam_min <= p.lam_max);
        }
    }

    #[test]
    fn diagonal_injection() {
        let vals = [0.3, -2.25, 5.5, 1.0, -0.75];
        let p = extreme_eigenvalues(&HermitianMatrix::diagonal(&vals));
        assert!((p.lam_min + 2.25).abs() <= EIGEN_TOL);
        assert!((p.lam_max - 5.5).abs() <= EIGEN_TOL);
    }

    #[test]
    fn deterministic_and_stream_consistent() {
        let spec = EnsembleSpec::gue(5);
        assert_eq!(
            sample_extremes(spec, 42).unwrap(),
            sample_extremes(spec, 42).unwrap()
        );
        let pairs = sample_pairs(spec, 3, 42, 1.0).unwrap();
        assert_eq!(pairs[0], sample_extremes(spec, 42).unwrap());
        assert_ne!(pairs[0], pairs[1]);
    }

    #[test]
    fn uniform_entries_in_range() {
        let a = sample_matrix(EnsembleSpec::uniform(6), 9, 0);
        for i in 0..6 {
            for j in 0..6 {
                let v = a.get(i, j);
                assert!(v.re.abs() <= 1.0 && v.im.abs() <= 1.0);
            }
        }
    }

    #[test]
    fn rejects_small_inputs() {
        assert!(sample_extremes(EnsembleSpec::gue(1), 0).is_err());
        assert!(sample_correlation(EnsembleSpec::gue(4), 99, 0).is_err());
        assert!(edge_convention_check(10, 49, 0).is_err());
    }

    #[test]
    fn gue_n2_mean_of_largest() {
        let pairs = sample_pairs(EnsembleSpec::gue(2), 100_000, 7, 1.0).unwrap();
        let xs: Vec<f64> = pairs.iter().map(|p| p.lam_max).collect();
        let mean = pairwise_sum(&xs) / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let se = (var / xs.len() as f64).sqrt();
        let exact = (2.0 / std::f64::consts::PI).sqrt();
        assert!(
            (mean - exact).abs() < 3.0 * se,
            "{mean} vs {exact} (se {se})"
        );
    }

    #[test]
    fn correlation_is_scale_invariant() {
        let spec = EnsembleSpec::uniform(8);
        let a = sample_correlation(spec, 500, 3).unwrap();
        let b = sample_correlation_scaled(spec, 500, 3, 3.7).unwrap();
        assert!((a.rho - b.rho).abs() < 1e-12);
    }
}
