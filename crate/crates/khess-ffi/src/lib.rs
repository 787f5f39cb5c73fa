//! C ABI for the khess numerical laboratory.
//!
//! Conventions: every function returns a [`KhessStatus`]; outputs go through
//! pointers; solver results are opaque handles freed with
//! [`khess_solution_free`]. The most recent error message of the calling
//! thread is available from [`khess_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use khess::cone;
use khess::solver::{
    solve_dirichlet, DirichletProblem, GridDomain, RhsSpec, ScalarField, SolveReport,
};
use khess::symfun::{self, Spectrum};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KhessStatus {
    Ok = 0,
    InvalidArgument = 1,
    DomainError = 2,
    DegenerateSpectrum = 3,
    NonConvergence = 4,
    ConeViolation = 5,
    IoError = 6,
    InternalError = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

fn status_of(err: &khess::Error) -> KhessStatus {
    match err {
        khess::Error::DegenerateSpectrum { .. } => KhessStatus::DegenerateSpectrum,
        khess::Error::NonConvergence { .. } => KhessStatus::NonConvergence,
        khess::Error::ConeViolation { .. } | khess::Error::Admissibility { .. } => {
            KhessStatus::ConeViolation
        }
        khess::Error::Io(_) => KhessStatus::IoError,
        _ => KhessStatus::DomainError,
    }
}

fn fail(err: &khess::Error) -> KhessStatus {
    let status = status_of(err);
    set_last_error(err.to_string());
    status
}

fn invalid(message: &str) -> KhessStatus {
    set_last_error(message.to_string());
    KhessStatus::InvalidArgument
}

fn guard(body: impl FnOnce() -> KhessStatus) -> KhessStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic".to_string());
            KhessStatus::InternalError
        }
    }
}

/// Message of the most recent error on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn khess_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

unsafe fn spectrum_from_raw(values: *const f64, n: usize) -> Result<Spectrum, KhessStatus> {
    if values.is_null() {
        return Err(invalid("values pointer is null"));
    }
    let slice = std::slice::from_raw_parts(values, n);
    Spectrum::new(slice.to_vec()).map_err(|e| fail(&e))
}

/// sigma_k of the spectrum `values[0..n]`.
///
/// # Safety
/// `values` must point to `n` readable doubles and `out` to a writable one.
#[no_mangle]
pub unsafe extern "C" fn khess_sigma(
    values: *const f64,
    n: usize,
    k: usize,
    out: *mut f64,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let lam = match spectrum_from_raw(values, n) {
            Ok(l) => l,
            Err(s) => return s,
        };
        match symfun::sigma(k, &lam) {
            Ok(v) => {
                *out = v;
                KhessStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// First partial d sigma_k / d lam_i (0-based i).
///
/// # Safety
/// `values` must point to `n` readable doubles and `out` to a writable one.
#[no_mangle]
pub unsafe extern "C" fn khess_sigma_d1(
    values: *const f64,
    n: usize,
    k: usize,
    i: usize,
    out: *mut f64,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let lam = match spectrum_from_raw(values, n) {
            Ok(l) => l,
            Err(s) => return s,
        };
        match symfun::sigma_d1(k, &lam, i) {
            Ok(v) => {
                *out = v;
                KhessStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Second partial d^2 sigma_k / d lam_p d lam_q (0-based p, q).
///
/// # Safety
/// `values` must point to `n` readable doubles and `out` to a writable one.
#[no_mangle]
pub unsafe extern "C" fn khess_sigma_d2(
    values: *const f64,
    n: usize,
    k: usize,
    p: usize,
    q: usize,
    out: *mut f64,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let lam = match spectrum_from_raw(values, n) {
            Ok(l) => l,
            Err(s) => return s,
        };
        match symfun::sigma_d2(k, &lam, p, q) {
            Ok(v) => {
                *out = v;
                KhessStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Largest m such that the spectrum lies in the open cone Gamma_m
/// (0 when even sigma_1 is nonpositive).
///
/// # Safety
/// `values` must point to `n` readable doubles and `out` to a writable usize.
#[no_mangle]
pub unsafe extern "C" fn khess_cone_max_level(
    values: *const f64,
    n: usize,
    out: *mut usize,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let lam = match spectrum_from_raw(values, n) {
            Ok(l) => l,
            Err(s) => return s,
        };
        *out = cone::classify(&lam).max_level;
        KhessStatus::Ok
    })
}

/// Admissibility shift K0 = n * sup_f^{1/k}.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn khess_shift_bound(
    sup_f: f64,
    n: usize,
    k: usize,
    out: *mut f64,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        match cone::compute_shift(sup_f, n, k) {
            Ok(b) => {
                *out = b.k0;
                KhessStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Gap of the Newton-Maclaurin bound on the spectrum (nonnegative on
/// Gamma_k).
///
/// # Safety
/// `values` must point to `n` readable doubles and `out` to a writable one.
#[no_mangle]
pub unsafe extern "C" fn khess_newton_maclaurin_gap(
    values: *const f64,
    n: usize,
    k: usize,
    out: *mut f64,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let lam = match spectrum_from_raw(values, n) {
            Ok(l) => l,
            Err(s) => return s,
        };
        match symfun::newton_maclaurin_gap(&lam, k) {
            Ok(v) => {
                *out = v;
                KhessStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Opaque solver result: the solved field plus its report.
pub struct KhessSolution {
    field: ScalarField,
    report: SolveReport,
}

/// Solves sigma_k(D^2 u) = f_const on the cube [low, high]^dim with zero
/// boundary data. On success writes a heap handle to `out`; free it with
/// [`khess_solution_free`].
///
/// # Safety
/// `out` must point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn khess_solve_box_dirichlet(
    dim: usize,
    low: f64,
    high: f64,
    resolution: usize,
    k: usize,
    f_const: f64,
    tol: f64,
    max_iter: usize,
    out: *mut *mut KhessSolution,
) -> KhessStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        *out = std::ptr::null_mut();
        let domain = match GridDomain::cube(dim, low, high, resolution) {
            Ok(d) => d,
            Err(e) => return fail(&e),
        };
        let rhs = match RhsSpec::constant(f_const) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        let problem = DirichletProblem::zero_boundary(domain, k, rhs);
        match solve_dirichlet(&problem, tol, max_iter) {
            Ok((field, report)) => {
                *out = Box::into_raw(Box::new(KhessSolution { field, report }));
                KhessStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of grid nodes of the solution.
///
/// # Safety
/// `solution` must be a live handle from [`khess_solve_box_dirichlet`].
#[no_mangle]
pub unsafe extern "C" fn khess_solution_node_count(solution: *const KhessSolution) -> usize {
    if solution.is_null() {
        return 0;
    }
    (*solution).field.domain().node_count()
}

/// Newton iterations performed.
///
/// # Safety
/// `solution` must be a live handle from [`khess_solve_box_dirichlet`].
#[no_mangle]
pub unsafe extern "C" fn khess_solution_iterations(solution: *const KhessSolution) -> usize {
    if solution.is_null() {
        return 0;
    }
    (*solution).report.iterations
}

/// Final max-norm residual.
///
/// # Safety
/// `solution` must be a live handle from [`khess_solve_box_dirichlet`].
#[no_mangle]
pub unsafe extern "C" fn khess_solution_final_residual(solution: *const KhessSolution) -> f64 {
    if solution.is_null() {
        return f64::NAN;
    }
    (*solution).report.final_residual
}

/// Copies the node values (row-major, last axis fastest) into `out[0..len]`.
/// `len` must equal the node count.
///
/// # Safety
/// `solution` must be a live handle and `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn khess_solution_values(
    solution: *const KhessSolution,
    out: *mut f64,
    len: usize,
) -> KhessStatus {
    guard(|| {
        if solution.is_null() || out.is_null() {
            return invalid("null pointer");
        }
        let values = (*solution).field.values();
        if len != values.len() {
            return invalid("length does not match the node count");
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), out, len);
        KhessStatus::Ok
    })
}

/// Writes the solution in the `khess-field v1` format.
///
/// # Safety
/// `solution` must be a live handle and `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn khess_solution_write_field(
    solution: *const KhessSolution,
    path: *const c_char,
) -> KhessStatus {
    guard(|| {
        if solution.is_null() || path.is_null() {
            return invalid("null pointer");
        }
        let path = match std::ffi::CStr::from_ptr(path).to_str() {
            Ok(p) => p,
            Err(_) => return invalid("path is not valid UTF-8"),
        };
        match (*solution).field.write_path(path) {
            Ok(()) => KhessStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Frees a solution handle. Null is a no-op.
///
/// # Safety
/// `solution` must be a handle from [`khess_solve_box_dirichlet`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn khess_solution_free(solution: *mut KhessSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
