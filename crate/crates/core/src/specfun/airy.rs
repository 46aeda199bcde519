//! Airy function of the first kind and its derivative, real argument.
//!
//! Three regimes:
//!
//! * `|x| <= 8`: the Maclaurin pair series `Ai = c1 f - c2 g`, summed in
//!   double-double arithmetic. The two series grow like `Bi` while `Ai`
//!   decays, so plain `f64` loses up to thirteen digits near `x = 8`.
//! * `x > 8`: the exponentially decaying asymptotic expansion. Its optimal
//!   truncation error is about `exp(-2ζ)`, below `1e-13` once `x > 8`.
//! * `x < -8`: the oscillatory asymptotic expansion, same error estimate.

use super::dd::Dd;
use super::UNDERFLOW_CUTOFF;
use crate::{Error, Result};
use std::f64::consts::PI;

/// `Ai(0)` split into a double-double.
const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
/// `-Ai'(0)` split into a double-double.
const MINUS_AIP0: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_TERMS: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub ai_prime: f64,
    /// Set when `ai` or `ai_prime` fell below the underflow cutoff and was
    /// flushed to zero.
    pub underflow: bool,
}

/// Evaluates `Ai(x)` and `Ai'(x)`.
pub fn airy(x: f64) -> Result<AiryPair> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("airy: non-finite argument {x}")));
    }
    if x.abs() <= SERIES_LIMIT {
        Ok(maclaurin(x))
    } else if x > 0.0 {
        Ok(decaying_asymptotic(x))
    } else {
        Ok(oscillatory_asymptotic(-x))
    }
}

fn maclaurin(x: f64) -> AiryPair {
    let xdd = Dd::from_f64(x);
    let x3 = xdd * xdd * xdd;

    // f = sum t_k,  t_{k+1} = t_k x^3 / ((3k+2)(3k+3))
    // g = sum s_k,  s_{k+1} = s_k x^3 / ((3k+3)(3k+4))
    // f' = sum d_k, d_1 = x^2/2, d_{k+1} = d_k x^3 / ((3k)(3k+2))
    // g' = sum q_k, q_0 = 1,     q_{k+1} = q_k x^3 / ((3k+1)(3k+3))
    let mut t = Dd::from_f64(1.0);
    let mut s = xdd;
    let mut d = (xdd * xdd).div_f64(2.0);
    let mut q = Dd::from_f64(1.0);
    let (mut f, mut g, mut fp, mut gp) = (t, s, d, q);

    for k in 0..200u32 {
        let kf = f64::from(k);
        t = (t * x3).div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        s = (s * x3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        q = (q * x3).div_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f = f + t;
        g = g + s;
        gp = gp + q;
        if k >= 1 {
            d = (d * x3).div_f64((3.0 * kf) * (3.0 * kf + 2.0));
            fp = fp + d;
        }
        let small = |term: Dd, sum: Dd| term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300);
        if k >= 2 && small(t, f) && small(s, g) && small(d, fp) && small(q, gp) {
            break;
        }
    }

    let ai = (AI0 * f + (MINUS_AIP0 * g).neg()).to_f64();
    let ai_prime = (AI0 * fp + (MINUS_AIP0 * gp).neg()).to_f64();
    AiryPair {
        ai,
        ai_prime,
        underflow: false,
    }
}

/// Coefficients `u_k` and `v_k` of the Airy asymptotic expansions.
fn asymptotic_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(count);
    let mut v = Vec::with_capacity(count);
    u.push(1.0);
    v.push(1.0);
    for k in 1..count {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sums `sum_j (-1)^j c_k / zeta^k` over the given index sequence, using
/// every coefficient with `k < ASYMPTOTIC_TERMS`.
///
/// The term count is fixed rather than adaptive so that the truncation
/// error varies smoothly with `zeta`; divided differences of nearby values
/// (kernel ratios) would otherwise see jumps of the size of the error.
/// For `zeta >= 15` (|x| >= 8) the terms decrease up to `k = 2 zeta >= 30`.
fn truncated_series(coeffs: &[f64], indices: impl Iterator<Item = usize>, zeta: f64) -> f64 {
    let mut sum = 0.0;
    for (j, k) in indices.enumerate() {
        if k >= ASYMPTOTIC_TERMS {
            break;
        }
        let term = coeffs[k] / zeta.powi(k as i32);
        sum += if j % 2 == 0 { term } else { -term };
    }
    sum
}

fn decaying_asymptotic(x: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = asymptotic_coefficients(ASYMPTOTIC_TERMS);
    let su = truncated_series(&u, 0.., zeta);
    let sv = truncated_series(&v, 0.., zeta);
    let x4 = x.sqrt().sqrt();
    let log_norm = -zeta - (2.0 * PI.sqrt()).ln();

    let ln_ai = log_norm - x4.ln() + su.ln();
    let ln_aip = log_norm + x4.ln() + sv.ln();
    let mut underflow = false;
    let mut flush = |ln: f64| {
        if ln < UNDERFLOW_CUTOFF.ln() {
            underflow = true;
            0.0
        } else {
            ln.exp()
        }
    };
    let ai = flush(ln_ai);
    let ai_prime = -flush(ln_aip);
    AiryPair {
        ai,
        ai_prime,
        underflow,
    }
}

fn oscillatory_asymptotic(z: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let (u, v) = asymptotic_coefficients(ASYMPTOTIC_TERMS);
    let even = || (0..).step_by(2);
    let odd = || (1..).step_by(2);
    let p = truncated_series(&u, even(), zeta);
    let q = truncated_series(&u, odd(), zeta);
    let r = truncated_series(&v, even(), zeta);
    let s = truncated_series(&v, odd(), zeta);

    // sin(zeta + pi/4) and cos(zeta + pi/4) without rounding pi/4 into zeta.
    let (sz, cz) = zeta.sin_cos();
    let sin_t = (sz + cz) * std::f64::consts::FRAC_1_SQRT_2;
    let cos_t = (cz - sz) * std::f64::consts::FRAC_1_SQRT_2;

    let z4 = z.sqrt().sqrt();
    let norm = 1.0 / PI.sqrt();
    AiryPair {
        ai: norm / z4 * (sin_t * p - cos_t * q),
        ai_prime: -norm * z4 * (cos_t * r + sin_t * s),
        underflow: false,
    }
}
