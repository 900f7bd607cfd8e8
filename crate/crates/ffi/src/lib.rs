//! C ABI for the `lowrank-recovery` solvers and penalty bounds.
//!
//! Matrices and supports cross the boundary as opaque handles created by
//! `lr_matrix_new` / `lr_support_new` and released with the matching `_free`. Every fallible
//! call returns an [`LrStatus`]; on failure, `lr_last_error_message` describes the most
//! recent error on the calling thread. Panics are caught and reported as
//! `LR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lowrank_recovery::linalg::{matrix_norm, DenseMatrix, NormKind, SupportSet};
use lowrank_recovery::mc::{mc_tau_bound_data, solve_mc, McSolveOptions, SolveReport};
use lowrank_recovery::rpca::{default_lambda, optimal_epsilon, rpca_tau_bound_data, solve_rpca, RpcaSolveOptions};
use lowrank_recovery::Error;

/// Opaque dense matrix (row-major, finite entries).
pub struct LrMatrix(DenseMatrix);

/// Opaque index set.
pub struct LrSupport(SupportSet);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// The solver ran out of iterations; outputs hold the last iterate.
    NotConverged = 4,
    /// The instance lies outside the regime where the quantity is defined.
    Regime = 5,
    NumericalFailure = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LrNormKind {
    Frobenius = 0,
    Spectral = 1,
    Nuclear = 2,
    Linf = 3,
    L1 = 4,
}

/// Convergence summary filled in by the solvers.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct LrSolveInfo {
    pub iterations: usize,
    pub converged: bool,
    pub feas_residual: f64,
    pub step_size: f64,
    pub final_rank: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(err: &Error) -> LrStatus {
    match err {
        Error::DimensionMismatch { .. } => LrStatus::DimensionMismatch,
        Error::NotConverged { .. } => LrStatus::NotConverged,
        Error::SvdNotConverged => LrStatus::NumericalFailure,
        e if e.is_regime() => LrStatus::Regime,
        _ => LrStatus::InvalidArgument,
    }
}

fn fail(status: LrStatus, msg: impl Into<String>) -> LrStatus {
    set_last_error(msg);
    status
}

fn from_error(err: Error) -> LrStatus {
    let status = status_of(&err);
    fail(status, err.to_string())
}

/// Runs `body`, turning a panic into `LR_STATUS_PANIC`.
fn guard(body: impl FnOnce() -> LrStatus) -> LrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == LrStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(LrStatus::Panic, format!("panic: {msg}"))
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(LrStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

fn into_handle(m: DenseMatrix) -> *mut LrMatrix {
    Box::into_raw(Box::new(LrMatrix(m)))
}

fn fill_info(info: *mut LrSolveInfo, report: &SolveReport) {
    if !info.is_null() {
        // SAFETY: caller passes a valid, writable pointer or null.
        unsafe {
            *info = LrSolveInfo {
                iterations: report.iterations,
                converged: report.converged,
                feas_residual: report.feas_residual,
                step_size: report.step_size,
                final_rank: report.final_rank,
            };
        }
    }
}

/// Message for the last failed call on this thread; empty after a success. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a `rows x cols` matrix from `rows * cols` row-major values. `data` may be null
/// for a zero matrix.
///
/// # Safety
/// `data` must be null or point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut LrMatrix,
) -> LrStatus {
    guard(|| {
        non_null!(out);
        let Some(len) = rows.checked_mul(cols) else {
            return fail(LrStatus::InvalidArgument, "rows * cols overflows");
        };
        let m = if data.is_null() {
            DenseMatrix::zeros(rows, cols)
        } else {
            let values = std::slice::from_raw_parts(data, len).to_vec();
            match DenseMatrix::from_row_major(rows, cols, values) {
                Ok(m) => m,
                Err(e) => return from_error(e),
            }
        };
        *out = into_handle(m);
        LrStatus::Ok
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lr_matrix_free(m: *mut LrMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lr_matrix_rows(m: *const LrMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lr_matrix_cols(m: *const LrMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// Copies the row-major entries into `out`, which must hold exactly `len = rows * cols`.
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lr_matrix_copy_data(m: *const LrMatrix, out: *mut f64, len: usize) -> LrStatus {
    guard(|| {
        non_null!(m, out);
        let src = (*m).0.as_slice();
        if src.len() != len {
            return fail(
                LrStatus::DimensionMismatch,
                format!("buffer holds {len} values, matrix has {}", src.len()),
            );
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, len);
        LrStatus::Ok
    })
}

/// Creates an index set from `len` 0-based `(row_idx[k], col_idx[k])` pairs. Duplicates and
/// out-of-range pairs are rejected.
///
/// # Safety
/// `row_idx` and `col_idx` must point to `len` readable values (or be null when `len` is 0);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_support_new(
    rows: usize,
    cols: usize,
    row_idx: *const usize,
    col_idx: *const usize,
    len: usize,
    out: *mut *mut LrSupport,
) -> LrStatus {
    guard(|| {
        non_null!(out);
        let pairs: Vec<(usize, usize)> = if len == 0 {
            Vec::new()
        } else {
            non_null!(row_idx, col_idx);
            let r = std::slice::from_raw_parts(row_idx, len);
            let c = std::slice::from_raw_parts(col_idx, len);
            r.iter().copied().zip(c.iter().copied()).collect()
        };
        match SupportSet::new(rows, cols, pairs) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(LrSupport(s)));
                LrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lr_support_free(s: *mut LrSupport) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of indices, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lr_support_len(s: *const LrSupport) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_matrix_norm(m: *const LrMatrix, kind: LrNormKind, out: *mut f64) -> LrStatus {
    guard(|| {
        non_null!(m, out);
        let kind = match kind {
            LrNormKind::Frobenius => NormKind::Frobenius,
            LrNormKind::Spectral => NormKind::Spectral,
            LrNormKind::Nuclear => NormKind::Nuclear,
            LrNormKind::Linf => NormKind::Linf,
            LrNormKind::L1 => NormKind::L1,
        };
        match matrix_norm(&(*m).0, kind) {
            Ok(v) => {
                *out = v;
                LrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// `(4/p) ‖P_Ω M‖_F` from observed data.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_mc_tau_bound_data(
    observed: *const LrMatrix,
    omega: *const LrSupport,
    out: *mut f64,
) -> LrStatus {
    guard(|| {
        non_null!(observed, omega, out);
        match mc_tau_bound_data(&(*observed).0, &(*omega).0) {
            Ok(v) => {
                *out = v;
                LrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Matrix completion at penalty `tau`. `max_iters = 0` and `feas_tol <= 0` select the
/// defaults (5000, 1e-6). On `LR_STATUS_NOT_CONVERGED`, `*out_x` still receives the last
/// iterate and must be freed. `info` may be null.
///
/// # Safety
/// Handles must be live; `out_x` writable; `info` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lr_mc_solve(
    observed: *const LrMatrix,
    omega: *const LrSupport,
    tau: f64,
    max_iters: usize,
    feas_tol: f64,
    out_x: *mut *mut LrMatrix,
    info: *mut LrSolveInfo,
) -> LrStatus {
    guard(|| {
        non_null!(observed, omega, out_x);
        let mut opts = McSolveOptions::default();
        if max_iters > 0 {
            opts.max_iters = max_iters;
        }
        if feas_tol > 0.0 {
            opts.feas_tol = feas_tol;
        }
        match solve_mc(&(*observed).0, &(*omega).0, tau, &opts) {
            Ok(sol) => {
                fill_info(info, &sol.report);
                *out_x = into_handle(sol.x);
                LrStatus::Ok
            }
            Err(Error::NotConverged {
                iterations,
                residual,
                tol,
                partial,
                ..
            }) => {
                fill_info(info, &partial.report);
                *out_x = into_handle(partial.primary);
                fail(
                    LrStatus::NotConverged,
                    format!("no convergence after {iterations} iterations (residual {residual:e} > {tol:e})"),
                )
            }
            Err(e) => from_error(e),
        }
    })
}

/// `(2‖D‖_∞ + λ(√15/3)‖D‖_F) / (λ(1−λ))`.
///
/// # Safety
/// `d` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_rpca_tau_bound_data(d: *const LrMatrix, lambda: f64, out: *mut f64) -> LrStatus {
    guard(|| {
        non_null!(d, out);
        match rpca_tau_bound_data(&(*d).0, lambda) {
            Ok(v) => {
                *out = v;
                LrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Robust PCA at `(lambda, tau)`. Defaults and the not-converged contract follow
/// `lr_mc_solve` (default `feas_tol` 1e-7).
///
/// # Safety
/// `d` must be live; `out_l`, `out_s` writable; `info` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lr_rpca_solve(
    d: *const LrMatrix,
    lambda: f64,
    tau: f64,
    max_iters: usize,
    feas_tol: f64,
    out_l: *mut *mut LrMatrix,
    out_s: *mut *mut LrMatrix,
    info: *mut LrSolveInfo,
) -> LrStatus {
    guard(|| {
        non_null!(d, out_l, out_s);
        let mut opts = RpcaSolveOptions::default();
        if max_iters > 0 {
            opts.max_iters = max_iters;
        }
        if feas_tol > 0.0 {
            opts.feas_tol = feas_tol;
        }
        match solve_rpca(&(*d).0, lambda, tau, &opts) {
            Ok(sol) => {
                fill_info(info, &sol.report);
                *out_l = into_handle(sol.l);
                *out_s = into_handle(sol.s);
                LrStatus::Ok
            }
            Err(Error::NotConverged {
                iterations,
                residual,
                tol,
                partial,
                ..
            }) => {
                let partial = *partial;
                fill_info(info, &partial.report);
                let (rows, cols) = partial.primary.shape();
                *out_l = into_handle(partial.primary);
                *out_s = into_handle(partial.secondary.unwrap_or_else(|| DenseMatrix::zeros(rows, cols)));
                fail(
                    LrStatus::NotConverged,
                    format!("no convergence after {iterations} iterations (residual {residual:e} > {tol:e})"),
                )
            }
            Err(e) => from_error(e),
        }
    })
}

/// `1/√max(n1, n2)`.
#[no_mangle]
pub extern "C" fn lr_default_lambda(n1: usize, n2: usize) -> f64 {
    default_lambda(n1, n2)
}

/// `ε = (δ/2 + γ/4)/(γ/(2λ) + δ)`. `out_tau` (nullable) receives the equalized penalty.
///
/// # Safety
/// `out_epsilon` must be writable; `out_tau` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lr_optimal_epsilon(
    gamma: f64,
    delta: f64,
    lambda: f64,
    out_epsilon: *mut f64,
    out_tau: *mut f64,
) -> LrStatus {
    guard(|| {
        non_null!(out_epsilon);
        match optimal_epsilon(gamma, delta, lambda) {
            Ok(e) => {
                *out_epsilon = e.epsilon;
                if !out_tau.is_null() {
                    *out_tau = e.tau();
                }
                LrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
