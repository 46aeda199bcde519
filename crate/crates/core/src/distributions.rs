//! Tracy–Widom law and the finite-n laws of the edge-scaled extreme
//! eigenvalues
//! `λ̃min = 2^(1/2) n^(1/6) (λmin + √(2n))`, `λ̃max = 2^(1/2) n^(1/6) (λmax - √(2n))`.
//!
//! Public joint probabilities use the orientation `P(λ̃min ≤ x, λ̃max ≤ y)`.
//! The determinant itself computes the reflected probability
//! `P(-λ̃min ≤ x', λ̃max ≤ y)`, exposed as [`reflected_joint_cdf`]; the two
//! are linked by `P(λ̃min ≤ x, λ̃max ≤ y) = P(λ̃max ≤ y) - P(-λ̃min ≤ -x, λ̃max ≤ y)`.

use crate::fredholm::{
    converge, det_block, det_one_minus, AiryHalfLine, BlockOperator2x2, DiscretizedOperator,
};
use crate::kernels::{Block, KernelSample, KernelSpec};
use crate::quadrature::{
    truncated_halfline_refined, truncated_halfline_with_nodes, DecayModel, Direction,
    QuadratureRule, Refinement, DEFAULT_NODES,
};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Smallest argument accepted by the Tracy–Widom evaluations.
pub const TW_LOWER_LIMIT: f64 = -12.0;

/// Default table grid `[-10, 6]` with step `0.05`.
pub const DEFAULT_GRID: (f64, f64, f64) = (-10.0, 6.0, 0.05);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Law {
    TracyWidom,
    /// `P(-λ̃min ≤ t)` at size `n`.
    MinScaled(usize),
    /// `P(λ̃max ≤ t)` at size `n`.
    MaxScaled(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionGrid {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub pdf: Option<Vec<f64>>,
    pub law: Law,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointCdfValue {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    /// `P(λ̃min ≤ x, λ̃max ≤ y)`.
    pub joint: f64,
    /// `P(λ̃min ≤ x) P(λ̃max ≤ y)`.
    pub product: f64,
    /// `¼ F2'(-x) F2'(y) n^(-2/3)`.
    pub correction_predictor: f64,
}

impl JointCdfValue {
    pub fn deviation(&self) -> f64 {
        self.joint - self.product
    }
}

fn check_tw_arg(t: f64) -> Result<()> {
    if t.is_nan() {
        return Err(Error::Domain("Tracy–Widom argument is NaN".into()));
    }
    if t < TW_LOWER_LIMIT {
        return Err(Error::Range(format!(
            "F2({t}) underflows; arguments below {TW_LOWER_LIMIT} are not supported"
        )));
    }
    Ok(())
}

/// `F2(t) = det(I - P_t K_Airy P_t)`.
pub fn tw_cdf(t: f64, tol: f64) -> Result<f64> {
    tw_cdf_with(t, tol, Refinement::NONE)
}

pub fn tw_cdf_with(t: f64, tol: f64, refinement: Refinement) -> Result<f64> {
    check_tw_arg(t)?;
    let len = refinement.length_factor;
    converge(refinement.start_nodes(), tol, |m| {
        AiryHalfLine::refined(t, tol, m, len)?.det()
    })
    .map(|(v, _)| v)
}

/// `(F2(t), F2'(t))` on one converged discretization; `F2' = F2 u`.
pub fn tw_cdf_and_pdf(t: f64, tol: f64) -> Result<(f64, f64)> {
    tw_cdf_and_pdf_with(t, tol, Refinement::NONE)
}

pub fn tw_cdf_and_pdf_with(t: f64, tol: f64, refinement: Refinement) -> Result<(f64, f64)> {
    check_tw_arg(t)?;
    let eval = |m: usize| -> Result<(f64, f64)> {
        let h = AiryHalfLine::refined(t, tol, m, refinement.length_factor)?;
        let f = h.det()?;
        Ok((f, f * h.u()?))
    };
    let dist = |a: &(f64, f64), b: &(f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
    crate::fredholm::converge_with(refinement.start_nodes(), tol, eval, dist).map(|(v, _)| v)
}

/// `F2'(t)`.
pub fn tw_pdf(t: f64, tol: f64) -> Result<f64> {
    tw_cdf_and_pdf(t, tol).map(|(_, p)| p)
}

/// Centered difference `(F2(t+h) - F2(t-h)) / 2h`.
///
/// Both determinants use the same node count and the same interval length,
/// shifted by `±h`, so their discretization errors cancel in the difference.
pub fn tw_pdf_fd(t: f64, h: f64, tol: f64) -> Result<f64> {
    check_tw_arg(t - h)?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Domain(format!("step h = {h} must be positive")));
    }
    let (_, m) = converge(DEFAULT_NODES, tol, |m| AiryHalfLine::new(t, tol, m)?.det())?;
    let base = truncated_halfline_with_nodes(t, Direction::Above, DecayModel::AiryTail, tol, m)?;
    let shifted = |s: f64| -> Result<f64> {
        let (lo, hi) = base.domain();
        let rule = shift_rule(&base, lo + s, hi + s);
        AiryHalfLine::on_rule(&rule)?.det()
    };
    Ok((shifted(h)? - shifted(-h)?) / (2.0 * h))
}

fn shift_rule(rule: &QuadratureRule, lo: f64, hi: f64) -> QuadratureRule {
    let (a, _) = rule.domain();
    let nodes: Vec<f64> = rule.nodes().iter().map(|x| x - a + lo).collect();
    QuadratureRule::from_parts(nodes, rule.weights().to_vec(), (lo, hi))
}

/// Grid points `lo, lo + step, ...` up to `hi` (inclusive within rounding).
pub fn grid_points(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(Error::Domain(format!("bad grid {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Tabulates `F2` and `F2'`.
pub fn tw_table(lo: f64, hi: f64, step: f64, tol: f64) -> Result<DistributionGrid> {
    let grid = grid_points(lo, hi, step)?;
    let values = grid
        .par_iter()
        .map(|&t| tw_cdf_and_pdf(t, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionGrid {
        cdf: values.iter().map(|v| v.0).collect(),
        pdf: Some(values.iter().map(|v| v.1).collect()),
        grid,
        law: Law::TracyWidom,
        tol,
    })
}

pub(crate) fn edge_scale(n: usize) -> f64 {
    FRAC_1_SQRT_2 * (n as f64).powf(-1.0 / 6.0)
}

/// Edge-scaled half-line `(t, t + T)` with kernel samples at both edges:
/// `plus` at `λ = √(2n) + cξ`, `minus` at `λ = -(√(2n) + cξ)`.
#[derive(Debug, Clone)]
pub(crate) struct EdgeHalfLine {
    pub start: f64,
    pub rule: QuadratureRule,
    plus: Vec<KernelSample>,
    minus: Vec<KernelSample>,
}

impl EdgeHalfLine {
    pub fn new(n: usize, t: f64, tol: f64, nodes: usize) -> Result<Self> {
        Self::refined(n, t, tol, nodes, 1.0)
    }

    pub fn refined(n: usize, t: f64, tol: f64, nodes: usize, length_factor: f64) -> Result<Self> {
        let rule = truncated_halfline_refined(
            t,
            Direction::Above,
            DecayModel::GaussianTail(n),
            tol,
            nodes,
            length_factor,
        )?;
        let sample = |block: Block| {
            rule.nodes()
                .iter()
                .map(|&x| KernelSpec::EdgeScaled { n, block }.row_sample(x))
                .collect::<Result<Vec<_>>>()
        };
        Ok(EdgeHalfLine {
            start: t,
            plus: sample(Block::B22)?,
            minus: sample(Block::B11)?,
            rule,
        })
    }

    fn operator(n: usize, block: Block, rows: &Self, cols: &Self) -> DiscretizedOperator {
        let pick = |h: &Self, negative: bool| {
            if negative {
                h.minus.clone()
            } else {
                h.plus.clone()
            }
        };
        let (rneg, cneg) = match block {
            Block::B11 => (true, true),
            Block::B12 => (true, false),
            Block::B21 => (false, true),
            Block::B22 => (false, false),
        };
        DiscretizedOperator::from_samples(
            KernelSpec::EdgeScaled { n, block },
            &rows.rule,
            &pick(rows, rneg),
            &cols.rule,
            &pick(cols, cneg),
        )
    }

    /// `P(λ̃max ≤ t) = det(I - P_t K22 P_t)`.
    pub fn max_det(&self, n: usize) -> Result<f64> {
        det_one_minus(&Self::operator(n, Block::B22, self, self))
    }

    /// `P(-λ̃min ≤ t) = det(I - P_t K11 P_t)`.
    pub fn min_det(&self, n: usize) -> Result<f64> {
        det_one_minus(&Self::operator(n, Block::B11, self, self))
    }

    /// `P(-λ̃min ≤ x', λ̃max ≤ y)` for `self` at `x'` and `upper` at `y`.
    pub fn joint_det(&self, n: usize, upper: &Self) -> Result<f64> {
        let block = BlockOperator2x2::new(
            Self::operator(n, Block::B11, self, self),
            Self::operator(n, Block::B12, self, upper),
            Self::operator(n, Block::B21, upper, self),
            Self::operator(n, Block::B22, upper, upper),
        )?;
        det_block(&block)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("matrix size n must be at least 1".into()));
    }
    Ok(())
}

fn check_finite(v: f64, name: &str) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Domain(format!("{name} = {v} is not finite")));
    }
    Ok(())
}

/// `P(λ̃max ≤ y)` at size `n`.
pub fn marginal_max_cdf(n: usize, y: f64, tol: f64) -> Result<f64> {
    marginal_max_cdf_with(n, y, tol, Refinement::NONE)
}

pub fn marginal_max_cdf_with(n: usize, y: f64, tol: f64, refinement: Refinement) -> Result<f64> {
    check_n(n)?;
    check_finite(y, "y")?;
    let len = refinement.length_factor;
    converge(refinement.start_nodes(), tol, |m| {
        EdgeHalfLine::refined(n, y, tol, m, len)?.max_det(n)
    })
    .map(|(v, _)| v)
}

/// `P(-λ̃min ≤ x) = det(I - P_x K11 P_x)` at size `n`. By parity this equals
/// [`marginal_max_cdf`] at the same argument.
pub fn marginal_min_cdf(n: usize, x: f64, tol: f64) -> Result<f64> {
    marginal_min_cdf_with(n, x, tol, Refinement::NONE)
}

pub fn marginal_min_cdf_with(n: usize, x: f64, tol: f64, refinement: Refinement) -> Result<f64> {
    check_n(n)?;
    check_finite(x, "x")?;
    let len = refinement.length_factor;
    converge(refinement.start_nodes(), tol, |m| {
        EdgeHalfLine::refined(n, x, tol, m, len)?.min_det(n)
    })
    .map(|(v, _)| v)
}

/// `P(λ̃min ≤ x) = 1 - P(-λ̃min < -x)`.
pub fn min_cdf(n: usize, x: f64, tol: f64) -> Result<f64> {
    Ok(1.0 - marginal_min_cdf(n, -x, tol)?)
}

/// Unscaled endpoints `(X, Y)` of the reflected event
/// `{X ≤ λmin, λmax ≤ Y}` = `{-λ̃min ≤ x', λ̃max ≤ y}`.
pub fn unscaled_endpoints(n: usize, x_reflected: f64, y: f64) -> (f64, f64) {
    let edge = (2.0 * n as f64).sqrt();
    let c = edge_scale(n);
    (-edge - c * x_reflected, edge + c * y)
}

/// `P(-λ̃min ≤ x', λ̃max ≤ y)`; requires the unscaled endpoints to satisfy
/// `X < Y`.
pub fn reflected_joint_cdf(n: usize, x_reflected: f64, y: f64, tol: f64) -> Result<f64> {
    reflected_joint_cdf_with(n, x_reflected, y, tol, Refinement::NONE)
}

pub fn reflected_joint_cdf_with(
    n: usize,
    x_reflected: f64,
    y: f64,
    tol: f64,
    refinement: Refinement,
) -> Result<f64> {
    check_n(n)?;
    check_finite(x_reflected, "x")?;
    check_finite(y, "y")?;
    let (big_x, big_y) = unscaled_endpoints(n, x_reflected, y);
    if big_x >= big_y {
        return Err(Error::Domain(format!(
            "joint CDF needs X < Y for X = -√(2n) - 2^(-1/2) n^(-1/6) x' and \
             Y = √(2n) + 2^(-1/2) n^(-1/6) y; got X = {big_x}, Y = {big_y} (n = {n}, x' = {x_reflected}, y = {y})"
        )));
    }
    let len = refinement.length_factor;
    converge(refinement.start_nodes(), tol, |m| {
        let lower = EdgeHalfLine::refined(n, x_reflected, tol, m, len)?;
        let upper = EdgeHalfLine::refined(n, y, tol, m, len)?;
        lower.joint_det(n, &upper)
    })
    .map(|(v, _)| v)
}

/// Joint law `P(λ̃min ≤ x, λ̃max ≤ y)` with its independent product and the
/// two-term correction.
pub fn joint_cdf(n: usize, x: f64, y: f64, tol: f64) -> Result<JointCdfValue> {
    joint_cdf_with(n, x, y, tol, Refinement::NONE)
}

pub fn joint_cdf_with(
    n: usize,
    x: f64,
    y: f64,
    tol: f64,
    refinement: Refinement,
) -> Result<JointCdfValue> {
    let reflected = reflected_joint_cdf_with(n, -x, y, tol, refinement)?;
    let max = marginal_max_cdf_with(n, y, tol, refinement)?;
    let min = 1.0 - marginal_min_cdf_with(n, -x, tol, refinement)?;
    Ok(JointCdfValue {
        n,
        x,
        y,
        joint: max - reflected,
        product: min * max,
        correction_predictor: correction_term(n, x, y, tol)?,
    })
}

/// `¼ F2'(-x) F2'(y) n^(-2/3)`.
pub fn correction_term(n: usize, x: f64, y: f64, tol: f64) -> Result<f64> {
    check_n(n)?;
    let fx = tw_pdf((-x).max(TW_LOWER_LIMIT), tol)?;
    let fy = tw_pdf(y.max(TW_LOWER_LIMIT), tol)?;
    Ok(0.25 * fx * fy * (n as f64).powf(-2.0 / 3.0))
}

/// Two-term model of the joint law with Tracy–Widom marginals:
/// `(1 - F2(-x)) F2(y) + ¼ F2'(-x) F2'(y) n^(-2/3)`.
pub fn expansion_predictor(n: usize, x: f64, y: f64, tol: f64) -> Result<f64> {
    let fmin = 1.0 - tw_cdf((-x).max(TW_LOWER_LIMIT), tol)?;
    let fmax = tw_cdf(y.max(TW_LOWER_LIMIT), tol)?;
    Ok(fmin * fmax + correction_term(n, x, y, tol)?)
}

/// Tabulates `P(λ̃max ≤ t)` (or `P(-λ̃min ≤ t)`) at size `n`.
pub fn marginal_table(law: Law, lo: f64, hi: f64, step: f64, tol: f64) -> Result<DistributionGrid> {
    let grid = grid_points(lo, hi, step)?;
    let cdf = grid
        .par_iter()
        .map(|&t| match law {
            Law::TracyWidom => tw_cdf(t, tol),
            Law::MaxScaled(n) => marginal_max_cdf(n, t, tol),
            Law::MinScaled(n) => marginal_min_cdf(n, t, tol),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionGrid {
        grid,
        cdf,
        pdf: None,
        law,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn tw_right_tail_is_one() {
        assert!((tw_cdf(8.0, TOL).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tw_increasing() {
        let mut prev = 0.0;
        for i in 0..=20 {
            let t = -6.0 + 0.5 * i as f64;
            let f = tw_cdf(t, TOL).unwrap();
            assert!(f > prev, "t = {t}");
            prev = f;
        }
    }

    #[test]
    fn tw_rejects_deep_left() {
        assert!(matches!(tw_cdf(-12.5, TOL), Err(Error::Range(_))));
        assert!(tw_cdf(-12.0, TOL).is_ok());
    }

    #[test]
    fn pdf_paths_agree() {
        for t in [-4.0, -1.5, 0.0, 2.0] {
            let p = tw_pdf(t, TOL).unwrap();
            let fd = tw_pdf_fd(t, 1e-4, TOL).unwrap();
            assert!((p - fd).abs() < 1e-7, "t = {t}: {p} vs {fd}");
            assert!(p > 0.0);
        }
    }

    #[test]
    fn marginals_agree_by_parity() {
        for t in [-3.0, -1.0, 0.0, 1.5] {
            let a = marginal_min_cdf(10, t, TOL).unwrap();
            let b = marginal_max_cdf(10, t, TOL).unwrap();
            assert!((a - b).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn marginal_right_tail() {
        assert!((marginal_max_cdf(20, 8.0, TOL).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn joint_far_out_is_one() {
        let v = joint_cdf(50, 8.0, 8.0, TOL).unwrap();
        assert!((v.joint - 1.0).abs() < 1e-8);
    }

    #[test]
    fn joint_rejects_overlap() {
        // n = 2: X < Y needs x' + y > -4 * 2^(2/3) ≈ -6.35.
        assert!(joint_cdf(2, 4.0, -3.0, TOL).is_err());
        assert!(reflected_joint_cdf(2, -4.0, -3.0, TOL).is_err());
    }

    #[test]
    fn joint_bounded_by_marginals() {
        let n = 8;
        for (x, y) in [(-1.0, 1.0), (0.5, -0.5), (2.0, 2.0), (-2.0, -2.0)] {
            let v = joint_cdf(n, x, y, TOL).unwrap();
            let mx = min_cdf(n, x, TOL).unwrap();
            let my = marginal_max_cdf(n, y, TOL).unwrap();
            assert!(v.joint <= mx.min(my) + 1e-9);
            assert!(v.joint >= -1e-10 && v.joint <= 1.0 + 1e-10);
            assert!(v.correction_predictor >= 0.0);
        }
    }

    #[test]
    fn predictor_exceeds_product() {
        for (x, y) in [(0.0, 0.0), (-1.0, 2.0), (3.0, -3.0)] {
            let p = expansion_predictor(100, x, y, TOL).unwrap();
            let prod = (1.0 - tw_cdf(-x, TOL).unwrap()) * tw_cdf(y, TOL).unwrap();
            assert!(p - prod >= 0.0);
        }
        let c = correction_term(100, 0.0, 0.0, TOL).unwrap();
        let f = tw_pdf(0.0, TOL).unwrap();
        assert!((c - 0.25 * f * f * 100f64.powf(-2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn grid_points_inclusive() {
        let g = grid_points(-10.0, 6.0, 0.05).unwrap();
        assert_eq!(g.len(), 321);
        assert!((g[320] - 6.0).abs() < 1e-12);
        assert!(grid_points(1.0, 0.0, 0.1).is_err());
    }
}
