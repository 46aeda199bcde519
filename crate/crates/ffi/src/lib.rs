//! C ABI for `gue_extremes`.
//!
//! Every fallible function returns a [`GueStatus`]; outputs go through
//! caller-provided pointers. On failure, [`gue_last_error_message`] returns
//! a description that stays valid until the next call on the same thread.
//! Samplers and tables are opaque heap handles released by their `_free`
//! functions.

use gue_extremes::distributions::{
    joint_cdf, marginal_max_cdf, marginal_min_cdf, tw_cdf, tw_cdf_and_pdf, tw_table,
    DistributionGrid,
};
use gue_extremes::fredholm::u_function;
use gue_extremes::moments::{correlation_extremes, tw_moments};
use gue_extremes::montecarlo::{
    extreme_eigenvalues, sample_correlation, sample_matrix, EnsembleKind, EnsembleSpec,
};
use gue_extremes::specfun::airy;
use gue_extremes::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GueStatus {
    Ok = 0,
    DomainError = 1,
    RangeError = 2,
    SingularError = 3,
    IoError = 4,
    NullPointer = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Ensemble selector for the sampling functions.
pub const GUE_ENSEMBLE_GUE: u32 = 0;
pub const GUE_ENSEMBLE_UNIFORM: u32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> GueStatus {
    match err {
        Error::Domain(_) => GueStatus::DomainError,
        Error::Range(_) => GueStatus::RangeError,
        Error::Singular(_) => GueStatus::SingularError,
        Error::Io(_) => GueStatus::IoError,
    }
}

struct Failure(GueStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null() -> Failure {
    Failure(GueStatus::NullPointer, "null output pointer".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GueStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GueStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GueStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn ensemble(kind: u32) -> Result<EnsembleKind, Failure> {
    match kind {
        GUE_ENSEMBLE_GUE => Ok(EnsembleKind::Gue),
        GUE_ENSEMBLE_UNIFORM => Ok(EnsembleKind::UniformWigner),
        other => Err(Failure(
            GueStatus::InvalidArgument,
            format!("unknown ensemble {other}"),
        )),
    }
}

/// Message for the last failed call on this thread; empty after success.
#[no_mangle]
pub extern "C" fn gue_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `Ai(x)` and `Ai'(x)`.
///
/// # Safety
/// `ai` and `ai_prime` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_airy(x: f64, ai: *mut f64, ai_prime: *mut f64) -> GueStatus {
    guard(|| {
        let p = airy(x)?;
        write(ai, p.ai)?;
        write(ai_prime, p.ai_prime)
    })
}

/// Tracy–Widom CDF `F2(t)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_tw_cdf(t: f64, tol: f64, out: *mut f64) -> GueStatus {
    guard(|| write(out, tw_cdf(t, tol)?))
}

/// Tracy–Widom density `F2'(t)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_tw_pdf(t: f64, tol: f64, out: *mut f64) -> GueStatus {
    guard(|| write(out, tw_cdf_and_pdf(t, tol)?.1))
}

/// `u(t) = F2'(t)/F2(t)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_u_function(t: f64, tol: f64, out: *mut f64) -> GueStatus {
    guard(|| write(out, u_function(t, tol)?))
}

/// Tracy–Widom mean and variance.
///
/// # Safety
/// `mean` and `variance` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_tw_moments(tol: f64, mean: *mut f64, variance: *mut f64) -> GueStatus {
    guard(|| {
        let m = tw_moments(tol)?;
        write(mean, m.mean)?;
        write(variance, m.variance)
    })
}

/// `P(λ̃max ≤ y)` at size `n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_marginal_max_cdf(
    n: usize,
    y: f64,
    tol: f64,
    out: *mut f64,
) -> GueStatus {
    guard(|| write(out, marginal_max_cdf(n, y, tol)?))
}

/// `P(-λ̃min ≤ x)` at size `n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_marginal_min_cdf(
    n: usize,
    x: f64,
    tol: f64,
    out: *mut f64,
) -> GueStatus {
    guard(|| write(out, marginal_min_cdf(n, x, tol)?))
}

/// Joint law `P(λ̃min ≤ x, λ̃max ≤ y)` with its product and correction.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GueJointCdf {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub joint: f64,
    pub product: f64,
    pub correction_predictor: f64,
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_joint_cdf(
    n: usize,
    x: f64,
    y: f64,
    tol: f64,
    out: *mut GueJointCdf,
) -> GueStatus {
    guard(|| {
        let v = joint_cdf(n, x, y, tol)?;
        write(
            out,
            GueJointCdf {
                n: v.n,
                x: v.x,
                y: v.y,
                joint: v.joint,
                product: v.product,
                correction_predictor: v.correction_predictor,
            },
        )
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GueCorrelation {
    pub n: usize,
    pub rho_det: f64,
    pub rho_asym: f64,
}

/// Determinant correlation of the extreme eigenvalues and its asymptote.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_correlation_extremes(
    n: usize,
    tol: f64,
    out: *mut GueCorrelation,
) -> GueStatus {
    guard(|| {
        let r = correlation_extremes(n, tol)?;
        write(
            out,
            GueCorrelation {
                n,
                rho_det: r.rho_det,
                rho_asym: r.rho_asym,
            },
        )
    })
}

/// Monte Carlo sample correlation.
///
/// # Safety
/// `rho` and `stderr` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gue_sample_correlation(
    ensemble_kind: u32,
    n: usize,
    samples: usize,
    seed: u64,
    rho: *mut f64,
    stderr: *mut f64,
) -> GueStatus {
    guard(|| {
        let spec = EnsembleSpec {
            kind: ensemble(ensemble_kind)?,
            n,
        };
        let c = sample_correlation(spec, samples, seed)?;
        write(rho, c.rho)?;
        write(stderr, c.stderr)
    })
}

/// Sequential sampler of extreme eigenvalue pairs.
pub struct GueSampler {
    spec: EnsembleSpec,
    seed: u64,
    next: u64,
}

/// # Safety
/// `out` must be valid for writes. The handle is released with
/// [`gue_sampler_free`].
#[no_mangle]
pub unsafe extern "C" fn gue_sampler_new(
    ensemble_kind: u32,
    n: usize,
    seed: u64,
    out: *mut *mut GueSampler,
) -> GueStatus {
    guard(|| {
        let kind = ensemble(ensemble_kind)?;
        if n < 2 {
            return Err(Failure(
                GueStatus::DomainError,
                format!("n = {n} must be at least 2"),
            ));
        }
        let s = Box::new(GueSampler {
            spec: EnsembleSpec { kind, n },
            seed,
            next: 0,
        });
        write(out, Box::into_raw(s))
    })
}

/// Draws the next pair; sample `i` matches sample `i` of
/// [`gue_sample_correlation`] with the same seed.
///
/// # Safety
/// `sampler` must come from [`gue_sampler_new`]; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn gue_sampler_next(
    sampler: *mut GueSampler,
    lam_min: *mut f64,
    lam_max: *mut f64,
) -> GueStatus {
    guard(|| {
        let s = sampler.as_mut().ok_or_else(null)?;
        let p = extreme_eigenvalues(&sample_matrix(s.spec, s.seed, s.next));
        s.next += 1;
        write(lam_min, p.lam_min)?;
        write(lam_max, p.lam_max)
    })
}

/// # Safety
/// `sampler` must come from [`gue_sampler_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn gue_sampler_free(sampler: *mut GueSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Tabulated `F2` and `F2'`.
pub struct GueTable {
    grid: DistributionGrid,
}

/// # Safety
/// `out` must be valid for writes. The handle is released with
/// [`gue_table_free`].
#[no_mangle]
pub unsafe extern "C" fn gue_tw_table_new(
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
    out: *mut *mut GueTable,
) -> GueStatus {
    guard(|| {
        let grid = tw_table(lo, hi, step, tol)?;
        write(out, Box::into_raw(Box::new(GueTable { grid })))
    })
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `table` must come from [`gue_tw_table_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn gue_table_len(table: *const GueTable) -> usize {
    table.as_ref().map_or(0, |t| t.grid.grid.len())
}

/// # Safety
/// `table` must come from [`gue_tw_table_new`]; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn gue_table_row(
    table: *const GueTable,
    index: usize,
    t: *mut f64,
    cdf: *mut f64,
    pdf: *mut f64,
) -> GueStatus {
    guard(|| {
        let tab = table.as_ref().ok_or_else(null)?;
        let g = &tab.grid;
        if index >= g.grid.len() {
            return Err(Failure(
                GueStatus::InvalidArgument,
                format!("row {index} out of {}", g.grid.len()),
            ));
        }
        write(t, g.grid[index])?;
        write(cdf, g.cdf[index])?;
        let p = g.pdf.as_ref().map_or(f64::NAN, |p| p[index]);
        write(pdf, p)
    })
}

/// # Safety
/// `table` must come from [`gue_tw_table_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn gue_table_free(table: *mut GueTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
