//! C ABI for the `subdd` library.
//!
//! A [`SubddContext`] owns an assembled problem (volume system, factorized
//! subdomains and, for two-level methods, the coarse operator) built from
//! configuration text in the `key = value` format of the command-line tool.
//! Every function returns a [`SubddStatus`]; on failure the message is
//! available from [`subdd_last_error`] on the calling thread. Panics are
//! caught at the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use subdd::runner::{self, ExperimentConfig, Method};
use subdd::substructured::SubstructuredProblem;
use subdd::theory;
use subdd::Error;

/// Status codes. Values 2, 3 and 4 match the exit codes of the command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubddStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Diverged = 3,
    SizeCap = 4,
    DimensionMismatch = 5,
    Numerical = 6,
    Panic = 7,
}

/// Opaque handle to an assembled problem.
pub struct SubddContext {
    config: ExperimentConfig,
    problem: SubstructuredProblem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SubddStatus {
    match e {
        Error::Validation { .. } | Error::Parse(_) => SubddStatus::InvalidConfig,
        Error::Dimension { .. } => SubddStatus::DimensionMismatch,
        Error::Diverged { .. } => SubddStatus::Diverged,
        Error::SizeCap { .. } => SubddStatus::SizeCap,
        _ => SubddStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> SubddStatus
where
    F: FnOnce() -> Result<(), (SubddStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SubddStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside subdd");
            SubddStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SubddStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (SubddStatus, String) {
    (SubddStatus::NullPointer, format!("{what} is null"))
}

unsafe fn context<'a>(ctx: *const SubddContext) -> Result<&'a SubddContext, (SubddStatus, String)> {
    // SAFETY: the caller passes null or a pointer from `subdd_context_new`.
    unsafe { ctx.as_ref() }.ok_or_else(|| null_err("context"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (SubddStatus, String)> {
    if out.is_null() {
        return Err(null_err("output pointer"));
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn slice_in<'a>(ptr: *const f64, len: usize, expected: usize) -> Result<&'a [f64], (SubddStatus, String)> {
    if ptr.is_null() {
        return Err(null_err("input buffer"));
    }
    if len != expected {
        return Err((SubddStatus::DimensionMismatch, format!("expected length {expected}, got {len}")));
    }
    // SAFETY: the caller guarantees `len` readable doubles at `ptr`.
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

unsafe fn slice_out<'a>(ptr: *mut f64, len: usize, expected: usize) -> Result<&'a mut [f64], (SubddStatus, String)> {
    if ptr.is_null() {
        return Err(null_err("output buffer"));
    }
    if len != expected {
        return Err((SubddStatus::DimensionMismatch, format!("expected length {expected}, got {len}")));
    }
    // SAFETY: the caller guarantees `len` writable doubles at `ptr`.
    Ok(unsafe { std::slice::from_raw_parts_mut(ptr, len) })
}

/// Message of the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn subdd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn subdd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a context from configuration text.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn subdd_context_new(config: *const c_char, out: *mut *mut SubddContext) -> SubddStatus {
    guard(|| {
        if config.is_null() {
            return Err(null_err("config"));
        }
        if out.is_null() {
            return Err(null_err("output pointer"));
        }
        // SAFETY: checked non-null; NUL termination is the caller's contract.
        let text = unsafe { CStr::from_ptr(config) }
            .to_str()
            .map_err(|_| (SubddStatus::InvalidConfig, "config is not valid UTF-8".to_string()))?;
        let config = ExperimentConfig::parse(text).map_err(lib_err)?;
        let problem = SubstructuredProblem::new(
            &config.problem,
            config.level,
            config.decomposition_spec().map_err(lib_err)?,
        )
        .map_err(lib_err)?;
        let boxed = Box::into_raw(Box::new(SubddContext { config, problem }));
        // SAFETY: checked non-null above.
        unsafe { out.write(boxed) };
        Ok(())
    })
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must be null or a pointer from [`subdd_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn subdd_context_free(ctx: *mut SubddContext) {
    if !ctx.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Length `N^s` of interface vectors (`[Γ2; Γ1]`).
///
/// # Safety
/// `ctx` from [`subdd_context_new`]; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn subdd_interface_size(ctx: *const SubddContext, out: *mut usize) -> SubddStatus {
    guard(|| unsafe {
        let c = context(ctx)?;
        write_out(out, c.problem.operator.dim())
    })
}

/// `out = G v`, one application of the one-level smoother.
///
/// # Safety
/// `v` and `out` must hold `len` doubles each.
#[no_mangle]
pub unsafe extern "C" fn subdd_apply_g(
    ctx: *const SubddContext,
    v: *const f64,
    out: *mut f64,
    len: usize,
) -> SubddStatus {
    guard(|| unsafe {
        let c = context(ctx)?;
        let n = c.problem.operator.dim();
        let input = slice_in(v, len, n)?;
        let g = c.problem.operator.apply_g_uncounted(input).map_err(lib_err)?;
        slice_out(out, len, n)?.copy_from_slice(&g);
        Ok(())
    })
}

/// Right-hand side `b` of the substructured system `(I - G) v = b`.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn subdd_rhs(ctx: *const SubddContext, out: *mut f64, len: usize) -> SubddStatus {
    guard(|| unsafe {
        let c = context(ctx)?;
        let b = c.problem.operator.rhs();
        slice_out(out, len, b.len())?.copy_from_slice(b);
        Ok(())
    })
}

/// Solves with the configured method from a zero initial guess.
///
/// Writes the final interface iterate, the number of cycles and the last
/// relative error. Returns `DIVERGED` (with outputs written) if the
/// iteration diverged, `NUMERICAL` if it hit `maxit` without converging.
///
/// # Safety
/// `solution` must hold `len` doubles; `iterations` and `rel_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn subdd_solve(
    ctx: *const SubddContext,
    solution: *mut f64,
    len: usize,
    iterations: *mut usize,
    rel_error: *mut f64,
) -> SubddStatus {
    guard(|| unsafe {
        let c = context(ctx)?;
        let out = slice_out(solution, len, c.problem.operator.dim())?;
        let (h, _) = runner::solve_problem(&c.config, &c.problem).map_err(lib_err)?;
        out.copy_from_slice(&h.solution);
        if !iterations.is_null() {
            write_out(iterations, h.iterations())?;
        }
        let last = h.metric().last().copied().unwrap_or(f64::NAN);
        if !rel_error.is_null() {
            write_out(rel_error, last)?;
        }
        match h.status {
            subdd::solvers::Status::Converged => Ok(()),
            subdd::solvers::Status::Diverged => Err((
                SubddStatus::Diverged,
                format!("diverged after {} cycles", h.iterations()),
            )),
            subdd::solvers::Status::MaxIterations => Err((
                SubddStatus::Numerical,
                format!("no convergence in {} cycles (metric {last:e})", h.iterations()),
            )),
        }
    })
}

/// Spectral radius of the configured iteration: the two-level operator, or
/// `G` itself for `psm` and `gmls`.
///
/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn subdd_spectral_radius(ctx: *const SubddContext, out: *mut f64) -> SubddStatus {
    guard(|| unsafe {
        let c = context(ctx)?;
        let reports = runner::spectra_for(&c.config, &c.problem).map_err(lib_err)?;
        let name = match c.config.method {
            Method::Psm | Method::Gmls => "G_s",
            _ => "T_2L",
        };
        let r = reports
            .iter()
            .find(|r| r.operator == name)
            .ok_or_else(|| (SubddStatus::Numerical, format!("no report for {name}")))?;
        write_out(out, r.rho_numeric)
    })
}

/// `sinh(kπ(L_j - δ)/L̃) / sinh(kπ(L_j + δ)/L̃)`.
///
/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn subdd_rho_rectangle(k: usize, l_j: f64, delta: f64, l_tilde: f64, out: *mut f64) -> SubddStatus {
    guard(|| unsafe { write_out(out, theory::rho_rectangle(k, l_j, delta, l_tilde).map_err(lib_err)?) })
}

/// Discrete counterpart of [`subdd_rho_rectangle`] for the 5-point stencil.
#[no_mangle]
pub extern "C" fn subdd_rho_discrete(k: usize, n: usize, own: usize, opposite: usize) -> f64 {
    theory::rho_discrete(k, n, own, opposite)
}
