//! Moments of the Tracy–Widom law and of the finite-n edge-scaled extreme
//! eigenvalues, and the correlation `ρ(λmin, λmax)`.
//!
//! Finite-n covariances use Hoeffding's identity
//! `Cov(X,Y) = ∬ [F_XY(x,y) - F_X(x) F_Y(y)] dx dy`, so only determinants
//! (never densities) are needed.

use crate::distributions::{
    edge_scale, tw_cdf, tw_cdf_and_pdf_with, EdgeHalfLine, Law, TW_LOWER_LIMIT,
};
use crate::fredholm::converge;
use crate::quadrature::{composite_gauss_legendre, QuadratureRule, Refinement, DEFAULT_NODES};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Integration range for Tracy–Widom moments.
pub const TW_RANGE: (f64, f64) = (TW_LOWER_LIMIT, 8.0);

const TW_PANELS: usize = 20;
const TW_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    /// Total probability captured by the integration range.
    pub mass: f64,
    pub law: Law,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRecord {
    pub n: usize,
    pub rho_det: f64,
    pub rho_asym: f64,
    pub rho_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub samples: Option<usize>,
}

/// Mean and variance of `F2` from `∫ t F2'(t) dt` and `∫ t² F2'(t) dt`.
pub fn tw_moments(tol: f64) -> Result<MomentSummary> {
    tw_moments_with(tol, Refinement::NONE)
}

/// As [`tw_moments`]; the refinement also multiplies the points per panel
/// and stretches the upper end of the integration range.
pub fn tw_moments_with(tol: f64, refinement: Refinement) -> Result<MomentSummary> {
    let (lo, hi) = (TW_RANGE.0, TW_RANGE.1 * refinement.length_factor);
    let panels = ((hi - lo) / (TW_RANGE.1 - TW_RANGE.0) * TW_PANELS as f64).ceil() as usize;
    let rule = composite_gauss_legendre(lo, hi, panels, TW_POINTS * refinement.node_factor.max(1))?;
    let pdf = rule
        .nodes()
        .par_iter()
        .map(|&t| tw_cdf_and_pdf_with(t, tol, refinement).map(|v| v.1))
        .collect::<Result<Vec<_>>>()?;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for ((&t, &w), &p) in rule.nodes().iter().zip(rule.weights()).zip(&pdf) {
        m0 += w * p;
        m1 += w * t * p;
        m2 += w * t * t * p;
    }
    Ok(MomentSummary {
        mean: m1,
        variance: m2 - m1 * m1,
        mass: m0,
        law: Law::TracyWidom,
        tol,
    })
}

/// `∫ (F2(t) - 1_{t>0}) dt` over the moment range; equals minus the mean.
pub fn tw_tail_integral(tol: f64) -> Result<f64> {
    let left = composite_gauss_legendre(TW_RANGE.0, 0.0, 12, TW_POINTS)?;
    let right = composite_gauss_legendre(0.0, TW_RANGE.1, 8, TW_POINTS)?;
    let sum = |rule: &QuadratureRule, shift: f64| -> Result<f64> {
        let vals = rule
            .nodes()
            .par_iter()
            .map(|&t| tw_cdf(t, tol).map(|f| f - shift))
            .collect::<Result<Vec<_>>>()?;
        Ok(vals.iter().zip(rule.weights()).map(|(v, w)| v * w).sum())
    };
    Ok(sum(&left, 0.0)? + sum(&right, 1.0)?)
}

/// Width of the composite Gauss–Legendre panels used for finite-n integrals.
const PANEL_WIDTH: f64 = 1.0;
const PANEL_POINTS: usize = 8;

/// Discretization of the finite-n integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub panel_width: f64,
    pub points_per_panel: usize,
    /// Extra length added on both sides of the integration range.
    pub margin: f64,
    /// Nyström node count; `None` converges it at the widest half-line.
    pub nodes: Option<usize>,
    /// Applied to the Nyström node count and the half-line lengths.
    pub refinement: Refinement,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            panel_width: PANEL_WIDTH,
            points_per_panel: PANEL_POINTS,
            margin: 0.0,
            nodes: None,
            refinement: Refinement::NONE,
        }
    }
}

fn panels(lo: f64, hi: f64, opts: &IntegrationOptions) -> Result<QuadratureRule> {
    let count = ((hi - lo) / opts.panel_width).ceil().max(1.0) as usize;
    composite_gauss_legendre(lo, hi, count, opts.points_per_panel)
}

/// Range `[lo, hi]` outside of which `P(λ̃max ≤ t)` is within `eps` of 0
/// or 1, on an integer grid.
pub fn marginal_support(n: usize, eps: f64, tol: f64) -> Result<(f64, f64)> {
    let cdf = |t: f64| -> Result<f64> {
        converge(DEFAULT_NODES, tol, |m| {
            EdgeHalfLine::new(n, t, tol, m)?.max_det(n)
        })
        .map(|v| v.0)
    };
    let mut lo = -1.0;
    while cdf(lo)? >= eps {
        lo -= 1.0;
        if lo < -1e4 {
            return Err(Error::Range(format!("no lower support bound for n = {n}")));
        }
    }
    let mut hi = 1.0;
    while 1.0 - cdf(hi)? >= eps {
        hi += 1.0;
        if hi > 1e3 {
            return Err(Error::Range(format!("no upper support bound for n = {n}")));
        }
    }
    Ok((lo, hi))
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!("n = {n} must be at least {min}")));
    }
    Ok(())
}

fn resolve_nodes(n: usize, lo: f64, tol: f64, opts: &IntegrationOptions) -> Result<usize> {
    let len = opts.refinement.length_factor;
    let m = match opts.nodes {
        Some(m) => m,
        None => {
            converge(DEFAULT_NODES / 2, tol, |m| {
                EdgeHalfLine::refined(n, lo, tol, m, len)?.max_det(n)
            })?
            .1
        }
    };
    Ok(m * opts.refinement.node_factor.max(1))
}

/// Mean and variance of `λ̃max` (`lower = false`) or of `-λ̃min`
/// (`lower = true`) at size `n`, from the tail integrals
/// `E X = ∫_0 (1-F) - ∫^0 F` and `E X² = 2∫_0 t(1-F) + 2∫^0 |t| F`.
pub fn marginal_moments_with(
    n: usize,
    lower: bool,
    tol: f64,
    opts: &IntegrationOptions,
) -> Result<MomentSummary> {
    check_n(n, 1)?;
    let (lo, hi) = marginal_support(n, tol, tol)?;
    let (lo, hi) = (lo - opts.margin, hi + opts.margin);
    let m = resolve_nodes(n, lo, tol, opts)?;
    let left = panels(lo, 0.0, opts)?;
    let right = panels(0.0, hi, opts)?;
    let cdf = |t: f64| -> Result<f64> {
        let h = EdgeHalfLine::refined(n, t, tol, m, opts.refinement.length_factor)?;
        if lower {
            h.min_det(n)
        } else {
            h.max_det(n)
        }
    };
    let eval = |rule: &QuadratureRule| -> Result<Vec<f64>> {
        rule.nodes().par_iter().map(|&t| cdf(t)).collect()
    };
    let (fl, fr) = (eval(&left)?, eval(&right)?);
    let (mut e1, mut e2) = (0.0, 0.0);
    for ((&t, &w), &f) in left.nodes().iter().zip(left.weights()).zip(&fl) {
        e1 -= w * f;
        e2 += 2.0 * w * (-t) * f;
    }
    for ((&t, &w), &f) in right.nodes().iter().zip(right.weights()).zip(&fr) {
        e1 += w * (1.0 - f);
        e2 += 2.0 * w * t * (1.0 - f);
    }
    Ok(MomentSummary {
        mean: e1,
        variance: e2 - e1 * e1,
        mass: fr.last().copied().unwrap_or(1.0) - fl.first().copied().unwrap_or(0.0),
        law: if lower {
            Law::MinScaled(n)
        } else {
            Law::MaxScaled(n)
        },
        tol,
    })
}

/// Moments of `λ̃max` at size `n`.
pub fn marginal_moments(n: usize, tol: f64) -> Result<MomentSummary> {
    marginal_moments_with(n, false, tol, &IntegrationOptions::default())
}

/// `Cov(λ̃min, λ̃max)` at size `n`.
pub fn covariance_extremes(n: usize, tol: f64) -> Result<f64> {
    covariance_extremes_with(n, tol, &IntegrationOptions::default())
}

/// Hoeffding covariance with explicit discretization.
///
/// With `A = {-λ̃min ≤ a}` and `B = {λ̃max ≤ b}` the integrand is
/// `P(A)P(B) - P(A ∩ B)`. Where the unscaled endpoints cross
/// (`a + b ≤ -2√(2n)/c`) the event `A ∩ B` is empty, so the inner integral
/// is split at that line.
pub fn covariance_extremes_with(n: usize, tol: f64, opts: &IntegrationOptions) -> Result<f64> {
    check_n(n, 2)?;
    let (lo, hi) = marginal_support(n, tol, tol)?;
    let (lo, hi) = (lo - opts.margin, hi + opts.margin);
    let m = resolve_nodes(n, lo, tol, opts)?;
    let crossing = -2.0 * (2.0 * n as f64).sqrt() / edge_scale(n);

    let outer = panels(lo, hi, opts)?;
    let shared = outer
        .nodes()
        .par_iter()
        .map(|&t| EdgeHalfLine::refined(n, t, tol, m, opts.refinement.length_factor))
        .collect::<Result<Vec<_>>>()?;
    let shared_max = shared
        .par_iter()
        .map(|h| h.max_det(n))
        .collect::<Result<Vec<_>>>()?;
    let index: HashMap<u64, usize> = outer
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.to_bits(), i))
        .collect();

    let inner_sum = |i: usize| -> Result<f64> {
        let lower = &shared[i];
        let p_a = lower.min_det(n)?;
        let cut = crossing - lower.start;
        let mut total = 0.0;
        if cut <= lo {
            for (j, upper) in shared.iter().enumerate() {
                let joint = lower.joint_det(n, upper)?;
                total += outer.weights()[j] * (p_a * shared_max[j] - joint);
            }
            return Ok(total);
        }
        let cut = cut.min(hi);
        for (rule, empty) in [
            (panels(lo, cut, opts)?, true),
            (panels(cut, hi, opts)?, false),
        ] {
            if rule.domain().1 <= rule.domain().0 {
                continue;
            }
            for (&b, &w) in rule.nodes().iter().zip(rule.weights()) {
                let own;
                let upper = match index.get(&b.to_bits()) {
                    Some(&j) => &shared[j],
                    None => {
                        own = EdgeHalfLine::refined(n, b, tol, m, opts.refinement.length_factor)?;
                        &own
                    }
                };
                let p_b = upper.max_det(n)?;
                let joint = if empty {
                    0.0
                } else {
                    lower.joint_det(n, upper)?
                };
                total += w * (p_a * p_b - joint);
            }
        }
        Ok(total)
    };
    let rows = (0..outer.len())
        .into_par_iter()
        .map(inner_sum)
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.iter().zip(outer.weights()).map(|(r, w)| r * w).sum())
}

/// `n^(-2/3) / (4σ²)`.
pub fn rho_asymptote(n: usize, tw_variance: f64) -> f64 {
    (n as f64).powf(-2.0 / 3.0) / (4.0 * tw_variance)
}

/// Correlation of the extreme eigenvalues at size `n` with its asymptote.
/// Correlation is invariant under the affine edge scaling, so the scaled
/// value is the unscaled one.
pub fn correlation_extremes(n: usize, tol: f64) -> Result<CorrelationRecord> {
    let sigma2 = tw_moments(tol)?.variance;
    correlation_extremes_given(n, tol, sigma2)
}

/// As [`correlation_extremes`] with a precomputed Tracy–Widom variance.
pub fn correlation_extremes_given(
    n: usize,
    tol: f64,
    tw_variance: f64,
) -> Result<CorrelationRecord> {
    correlation_extremes_with(n, tol, tw_variance, &IntegrationOptions::default())
}

pub fn correlation_extremes_with(
    n: usize,
    tol: f64,
    tw_variance: f64,
    opts: &IntegrationOptions,
) -> Result<CorrelationRecord> {
    check_n(n, 2)?;
    let cov = covariance_extremes_with(n, tol, opts)?;
    let var_min = marginal_moments_with(n, true, tol, opts)?.variance;
    let var_max = marginal_moments_with(n, false, tol, opts)?.variance;
    Ok(CorrelationRecord {
        n,
        rho_det: cov / (var_min * var_max).sqrt(),
        rho_asym: rho_asymptote(n, tw_variance),
        rho_mc: None,
        mc_stderr: None,
        samples: None,
    })
}
