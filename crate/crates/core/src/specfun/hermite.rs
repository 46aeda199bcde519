//! Orthonormal Hermite functions
//! `phi_m(t) = exp(-t^2/2) H_m(t) / (pi^(1/4) sqrt(m!) 2^(m/2))`.
//!
//! Evaluated by the forward three-term recurrence
//! `phi_{k+1} = sqrt(2/(k+1)) t phi_k - sqrt(k/(k+1)) phi_{k-1}`, starting
//! from `phi_0 = pi^(-1/4) exp(-t^2/2)` with the Gaussian kept in a separate
//! log-scale so that nothing underflows far beyond the turning point.

use super::{airy, UNDERFLOW_CUTOFF};
use crate::{Error, Result};
use std::f64::consts::PI;

pub const MAX_HERMITE_DEGREE: usize = 1_000_000;

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// `phi_m` and `phi_m'` at a point. The true values are
/// `value * exp(log_scale)` and `derivative * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteEval {
    pub m: usize,
    pub value: f64,
    pub derivative: f64,
    pub log_scale: f64,
}

impl HermiteEval {
    fn descale(x: f64, log_scale: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let ln = x.abs().ln() + log_scale;
        if ln < UNDERFLOW_CUTOFF.ln() {
            0.0
        } else {
            x * log_scale.exp()
        }
    }

    /// `phi_m(t)` as a plain float; magnitudes below `1e-300` become zero.
    pub fn true_value(&self) -> f64 {
        Self::descale(self.value, self.log_scale)
    }

    /// `phi_m'(t)` as a plain float; magnitudes below `1e-300` become zero.
    pub fn true_derivative(&self) -> f64 {
        Self::descale(self.derivative, self.log_scale)
    }

    /// True when de-scaling flushed a nonzero value or derivative to zero.
    pub fn underflows(&self) -> bool {
        (self.value != 0.0 && self.true_value() == 0.0)
            || (self.derivative != 0.0 && self.true_derivative() == 0.0)
    }
}

/// Returns `(phi_m, phi_{m-1}, log_scale)` with a common scale.
pub(crate) fn hermite_pair(m: usize, t: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * t * t;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for k in 0..m {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let size = cur.abs().max(prev.abs());
        if size > RESCALE_HIGH || (size < RESCALE_LOW && size > 0.0) {
            let e = size.ln();
            let f = (-e).exp();
            cur *= f;
            prev *= f;
            log_scale += e;
        }
    }
    (cur, prev, log_scale)
}

/// Evaluates `phi_m(t)` and `phi_m'(t)`.
///
/// The derivative comes from `phi_m' = -t phi_m + sqrt(2m) phi_{m-1}`.
pub fn hermite_phi(m: usize, t: f64) -> Result<HermiteEval> {
    if m > MAX_HERMITE_DEGREE {
        return Err(Error::Range(format!(
            "hermite_phi: degree {m} exceeds {MAX_HERMITE_DEGREE}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!(
            "hermite_phi: non-finite argument {t}"
        )));
    }
    let (value, prev, log_scale) = hermite_pair(m, t);
    let derivative = -t * value + (2.0 * m as f64).sqrt() * prev;
    Ok(HermiteEval {
        m,
        value,
        derivative,
        log_scale,
    })
}

/// Residual of the edge asymptotics of `phi_n`:
/// `phi_n(sqrt(2n) + 2^(-1/2) n^(-1/6) t) 2^(-1/4) n^(1/12) - (Ai(t) - Ai'(t) n^(-1/3) / 2)`.
///
/// The residual is `O(n^(-2/3))` locally uniformly in `t`.
pub fn plancherel_rotach_check(n: usize, t: f64) -> Result<f64> {
    if n < 10 {
        return Err(Error::Domain(format!(
            "plancherel_rotach_check: n = {n} must be at least 10"
        )));
    }
    let nf = n as f64;
    let point = (2.0 * nf).sqrt() + std::f64::consts::FRAC_1_SQRT_2 * nf.powf(-1.0 / 6.0) * t;
    let phi = hermite_phi(n, point)?.true_value();
    let a = airy(t)?;
    Ok(phi * 2f64.powf(-0.25) * nf.powf(1.0 / 12.0)
        - (a.ai - 0.5 * a.ai_prime * nf.powf(-1.0 / 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_at_origin() {
        let h = hermite_phi(0, 0.0).unwrap();
        assert!((h.true_value() - 0.7511255444649425).abs() < 1e-16);
        assert_eq!(h.derivative, 0.0);
    }

    #[test]
    fn parity_is_exact() {
        for m in [0usize, 1, 3, 7, 40, 333] {
            for t in [0.3, 1.7, 5.5, 31.0] {
                let a = hermite_phi(m, t).unwrap();
                let b = hermite_phi(m, -t).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(b.value, sign * a.value);
                assert_eq!(b.derivative, -sign * a.derivative);
                assert_eq!(a.log_scale, b.log_scale);
            }
        }
    }

    #[test]
    fn recurrence_consistency() {
        for m in 1..60usize {
            for t in [-4.2, -0.5, 0.9, 3.3, 9.0] {
                let prev = hermite_phi(m - 1, t).unwrap().true_value();
                let cur = hermite_phi(m, t).unwrap().true_value();
                let next = hermite_phi(m + 1, t).unwrap().true_value();
                let mf = m as f64;
                let rhs = (2.0 / (mf + 1.0)).sqrt() * t * cur - (mf / (mf + 1.0)).sqrt() * prev;
                let scale = next.abs().max(cur.abs()).max(prev.abs());
                assert!((next - rhs).abs() <= 1e-13 * scale, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn normalization_by_quadrature() {
        // Composite midpoint rule on [-14, 14] is spectrally accurate for
        // Gaussian-decaying smooth integrands.
        let h = 0.01;
        for m in [0usize, 1, 5, 12] {
            let mut s = 0.0;
            let mut t = -14.0 + 0.5 * h;
            while t < 14.0 {
                let v = hermite_phi(m, t).unwrap().true_value();
                s += v * v * h;
                t += h;
            }
            assert!((s - 1.0).abs() < 1e-12, "m={m}: {s}");
        }
    }

    #[test]
    fn far_tail_uses_log_scale() {
        let h = hermite_phi(5, 60.0).unwrap();
        assert!(h.value.is_finite() && h.value != 0.0);
        assert!(h.log_scale < -1000.0);
        assert_eq!(h.true_value(), 0.0);
        assert!(h.underflows());
    }

    #[test]
    fn large_degree_stays_finite() {
        let n = 1_000_000usize;
        let t = (2.0 * n as f64).sqrt();
        let h = hermite_phi(n, t).unwrap();
        assert!(h.true_value().is_finite());
        // Near the edge phi_n ~ 2^(1/4) n^(-1/12) Ai(0).
        let approx = 2f64.powf(0.25) * (n as f64).powf(-1.0 / 12.0) * 0.3550280538878172;
        assert!((h.true_value() / approx - 1.0).abs() < 0.01);
        assert!(hermite_phi(n + 1, 0.0).is_err());
    }

    #[test]
    fn plancherel_rotach_rate() {
        for t in [-3.0, -1.0, 1.5, 3.0] {
            let r16 = plancherel_rotach_check(16, t).unwrap();
            let r128 = plancherel_rotach_check(128, t).unwrap();
            let ratio = r128 / r16;
            assert!((0.125..=0.5).contains(&ratio), "t={t}: ratio {ratio}");
        }
    }

    #[test]
    fn plancherel_rotach_at_origin_converges_faster() {
        // The n^(-2/3) coefficient vanishes at t = 0, leaving an n^(-1)
        // residual: the 8-fold ratio is close to 1/8 (0.1134 in extended
        // precision) rather than 1/4.
        let r16 = plancherel_rotach_check(16, 0.0).unwrap();
        let r128 = plancherel_rotach_check(128, 0.0).unwrap();
        assert!((r16 + 0.001025094473861644).abs() < 1e-12);
        assert!((r128 + 0.00011629653120432636).abs() < 1e-12);
        assert!(r128.abs() <= 0.5 * r16.abs());
    }

    #[test]
    fn plancherel_rotach_envelope() {
        // At n = 10, t = -4 the residual is 0.13297 (extended precision), so
        // the 0.1 envelope holds on |t| <= 4 only from n = 17 on, and on
        // |t| <= 3 from n = 10.
        for n in [10usize, 12, 16, 17, 40, 100, 400] {
            let reach = if n >= 17 { 4.0 } else { 3.0 };
            let mut t = -reach;
            while t <= reach {
                let r = plancherel_rotach_check(n, t).unwrap();
                assert!(r.is_finite() && r.abs() < 0.1, "n={n} t={t} r={r}");
                t += 0.25;
            }
        }
        let edge = plancherel_rotach_check(10, -4.0).unwrap();
        assert!((edge + 0.13296744668088215).abs() < 1e-12);
        assert!(plancherel_rotach_check(9, 0.0).is_err());
    }
}
