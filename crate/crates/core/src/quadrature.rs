//! Gauss–Legendre rules and their placement on truncated half-lines.
//!
//! A projection onto `L^2(t, ∞)` is realized by a Gauss–Legendre rule on
//! `(t, t + T)`, where the cutoff `T` comes from an explicit bound on the
//! kernel diagonal beyond `t + T`.

use crate::kernels::hermite_kernel_diag;
use crate::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub const MAX_NODES: usize = 2048;
/// Node count used when none is requested explicitly.
pub const DEFAULT_NODES: usize = 64;
/// Shortest interval handed out by [`truncated_halfline`].
pub const MIN_LENGTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: (f64, f64),
}

impl QuadratureRule {
    pub(crate) fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, domain: (f64, f64)) -> Self {
        QuadratureRule {
            nodes,
            weights,
            domain,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre rule with `m` nodes on `(-1, 1)`.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_NODES {
        return Err(Error::Range(format!(
            "gauss_legendre: node count {m} not in 1..={MAX_NODES}"
        )));
    }
    let mf = m as f64;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    // Roots are symmetric; compute the upper half and mirror.
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: (-1.0, 1.0),
    })
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Affine image of `rule` on `(lo, hi)`.
pub fn map_to_interval(rule: &QuadratureRule, lo: f64, hi: f64) -> Result<QuadratureRule> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Domain(format!(
            "map_to_interval: need finite lo < hi, got ({lo}, {hi})"
        )));
    }
    let (a, b) = rule.domain;
    let jac = (hi - lo) / (b - a);
    Ok(QuadratureRule {
        nodes: rule.nodes.iter().map(|&x| lo + (x - a) * jac).collect(),
        weights: rule.weights.iter().map(|&w| w * jac).collect(),
        domain: (lo, hi),
    })
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `per_panel` nodes.
pub fn composite_gauss_legendre(
    lo: f64,
    hi: f64,
    panels: usize,
    per_panel: usize,
) -> Result<QuadratureRule> {
    if panels == 0 {
        return Err(Error::Range("composite_gauss_legendre: zero panels".into()));
    }
    let base = gauss_legendre(per_panel)?;
    let h = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * per_panel);
    let mut weights = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let piece = map_to_interval(&base, a, a + h)?;
        nodes.extend_from_slice(&piece.nodes);
        weights.extend_from_slice(&piece.weights);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: (lo, hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The domain `(t, ∞)`.
    Above,
    /// The domain `(-∞, t)`.
    Below,
}

/// How the kernel diagonal decays away from the spectral edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// Airy kernel: `K(s,s) <= exp(-4 s^(3/2)/3) / (8 pi s)` for large `s`.
    AiryTail,
    /// Edge-scaled Hermite kernel of size `n`; Gaussian decay in the unscaled
    /// variable.
    GaussianTail(usize),
}

/// Bound on the neglected Airy-kernel mass beyond `s`:
/// `exp(-4 s^(3/2)/3) / (16 pi sqrt(s)) * s`.
pub fn airy_tail_bound(s: f64) -> f64 {
    (-4.0 / 3.0 * s * s.sqrt()).exp() / (16.0 * PI * s.sqrt()) * s
}

fn airy_cutoff_point(tol: f64) -> f64 {
    // airy_tail_bound is decreasing on [1, ∞) and exceeds 1e-4 at s = 1.
    let (mut lo, mut hi) = (1.0, 64.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if airy_tail_bound(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    hi
}

/// First point `s >= max(start, 0)` past which the scaled Hermite kernel
/// diagonal stays below `tol`.
fn gaussian_cutoff_point(n: usize, start: f64, tol: f64) -> Result<f64> {
    let nf = n as f64;
    let c = FRAC_1_SQRT_2 * nf.powf(-1.0 / 6.0);
    let edge = (2.0 * nf).sqrt();
    let diag = |s: f64| c * hermite_kernel_diag(n, edge + c * s);
    let step = 0.25;
    let mut s = start.max(0.0);
    let mut prev = diag(s);
    for _ in 0..4000 {
        let next = diag(s + step);
        s += step;
        if next < tol && next <= prev {
            return Ok(s);
        }
        prev = next;
    }
    Err(Error::Range(format!(
        "no Gaussian-tail cutoff found for n = {n}, tol = {tol}"
    )))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 1e-16 && tol <= 1e-4) {
        return Err(Error::Range(format!(
            "tolerance {tol} not in (1e-16, 1e-4]"
        )));
    }
    Ok(())
}

/// Length `T` of the truncated half-line starting at `t`.
pub fn cutoff_length(t: f64, direction: Direction, model: DecayModel, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("cutoff_length: non-finite t = {t}")));
    }
    let end = match (model, direction) {
        (DecayModel::AiryTail, Direction::Above) => airy_cutoff_point(tol),
        (DecayModel::AiryTail, Direction::Below) => {
            return Err(Error::Domain(
                "the Airy kernel does not decay toward -∞".into(),
            ))
        }
        (DecayModel::GaussianTail(n), Direction::Above) => {
            if n == 0 {
                return Err(Error::Domain("GaussianTail needs n >= 1".into()));
            }
            gaussian_cutoff_point(n, t, tol)?
        }
        (DecayModel::GaussianTail(n), Direction::Below) => {
            // Mirror image through the centre of the spectrum.
            if n == 0 {
                return Err(Error::Domain("GaussianTail needs n >= 1".into()));
            }
            let nf = n as f64;
            let shift = 2.0 * (2.0 * nf).sqrt() / (FRAC_1_SQRT_2 * nf.powf(-1.0 / 6.0));
            let mirrored = -t - shift;
            return cutoff_length(mirrored, Direction::Above, model, tol);
        }
    };
    Ok((end - t).max(MIN_LENGTH))
}

/// Multipliers on top of an automatic discretization: the starting node
/// count of node doubling and the truncated-interval length. Used to probe
/// the stability of converged values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub node_factor: usize,
    pub length_factor: f64,
}

impl Refinement {
    pub const NONE: Refinement = Refinement {
        node_factor: 1,
        length_factor: 1.0,
    };

    pub fn doubled() -> Self {
        Refinement {
            node_factor: 2,
            ..Self::NONE
        }
    }

    pub fn enlarged(length_factor: f64) -> Self {
        Refinement {
            length_factor,
            ..Self::NONE
        }
    }

    /// Starting node count for node doubling.
    pub fn start_nodes(&self) -> usize {
        DEFAULT_NODES * self.node_factor.max(1)
    }
}

impl Default for Refinement {
    fn default() -> Self {
        Self::NONE
    }
}

/// Gauss–Legendre rule with [`DEFAULT_NODES`] nodes on the truncated
/// half-line at `t`.
pub fn truncated_halfline(
    t: f64,
    direction: Direction,
    model: DecayModel,
    tol: f64,
) -> Result<QuadratureRule> {
    truncated_halfline_with_nodes(t, direction, model, tol, DEFAULT_NODES)
}

pub fn truncated_halfline_with_nodes(
    t: f64,
    direction: Direction,
    model: DecayModel,
    tol: f64,
    nodes: usize,
) -> Result<QuadratureRule> {
    truncated_halfline_refined(t, direction, model, tol, nodes, 1.0)
}

/// As [`truncated_halfline_with_nodes`] with the cutoff length multiplied by
/// `length_factor`.
pub fn truncated_halfline_refined(
    t: f64,
    direction: Direction,
    model: DecayModel,
    tol: f64,
    nodes: usize,
    length_factor: f64,
) -> Result<QuadratureRule> {
    if !(length_factor >= 1.0 && length_factor.is_finite()) {
        return Err(Error::Domain(format!(
            "length factor {length_factor} must be at least 1"
        )));
    }
    let len = cutoff_length(t, direction, model, tol)? * length_factor;
    let base = gauss_legendre(nodes)?;
    match direction {
        Direction::Above => map_to_interval(&base, t, t + len),
        Direction::Below => map_to_interval(&base, t - len, t),
    }
}
