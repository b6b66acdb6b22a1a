//! C interface to `conic-ch`.
//!
//! Every fallible function returns a [`CchStatus`]; on failure the message is
//! available from [`cch_last_error_message`] on the same thread. Simulations
//! are opaque handles created by [`cch_simulation_new`] and released by
//! [`cch_simulation_free`]. Strings returned by the library must be released
//! with [`cch_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use conic_ch::config::RunConfig;
use conic_ch::dynamics::Simulation;
use conic_ch::indicial;
use conic_ch::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CchStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad configuration or parameters.
    Validation = 3,
    /// The computation failed (non-finite state, eigensolver failure, ...).
    Runtime = 4,
    /// Output buffer too small.
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque simulation handle.
pub struct CchSimulation {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: CchStatus, msg: impl Into<String>) -> CchStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> CchStatus {
    let status = if e.is_validation() {
        CchStatus::Validation
    } else {
        CchStatus::Runtime
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> CchStatus) -> CchStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == CchStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(CchStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<Option<&'a str>, CchStatus> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| fail(CchStatus::InvalidUtf8, "string is not valid UTF-8"))
}

/// Message for the last failure on this thread; empty after a success. The
/// pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn cch_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a simulation from `key = value` configuration text (NULL for the
/// defaults). The initial field is built immediately.
///
/// # Safety
/// `config` must be NULL or a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_new(config: *const c_char, out: *mut *mut CchSimulation) -> CchStatus {
    guard(|| {
        if out.is_null() {
            return fail(CchStatus::NullPointer, "out is NULL");
        }
        *out = ptr::null_mut();
        let text = match read_str(config) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let built = RunConfig::from_sources(text, &[]).and_then(|cfg| {
            let disc = Arc::new(cfg.discretization()?);
            Simulation::new(disc, cfg.solver()?)
        });
        match built {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(CchSimulation { sim }));
                CchStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or a handle from [`cch_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_free(sim: *mut CchSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advance by `n_steps` time steps.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_step(sim: *mut CchSimulation, n_steps: usize) -> CchStatus {
    guard(|| {
        let Some(s) = sim.as_mut() else {
            return fail(CchStatus::NullPointer, "sim is NULL");
        };
        for _ in 0..n_steps {
            if let Err(e) = s.sim.step() {
                return from_error(e);
            }
        }
        CchStatus::Ok
    })
}

unsafe fn getter(sim: *const CchSimulation, out: *mut f64, f: impl FnOnce(&Simulation) -> f64) -> CchStatus {
    guard(|| match (sim.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = f(&s.sim);
            CchStatus::Ok
        }
        _ => fail(CchStatus::NullPointer, "sim or out is NULL"),
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_time(sim: *const CchSimulation, out: *mut f64) -> CchStatus {
    getter(sim, out, |s| s.time())
}

/// Discrete Ginzburg-Landau energy of the current field.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_energy(sim: *const CchSimulation, out: *mut f64) -> CchStatus {
    getter(sim, out, |s| s.energy())
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_mass(sim: *const CchSimulation, out: *mut f64) -> CchStatus {
    getter(sim, out, |s| s.mass())
}

/// Grid shape: radial nodes and angles.
///
/// # Safety
/// `sim` must be a live handle; `n_radial` and `n_theta` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_shape(sim: *const CchSimulation, n_radial: *mut usize, n_theta: *mut usize) -> CchStatus {
    guard(|| match sim.as_ref() {
        Some(s) if !n_radial.is_null() && !n_theta.is_null() => {
            let (n, mt) = s.sim.discretization().shape();
            *n_radial = n;
            *n_theta = mt;
            CchStatus::Ok
        }
        _ => fail(CchStatus::NullPointer, "NULL argument"),
    })
}

/// Copy the field, row-major `[radial][theta]`, into `buf` of length `len`.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cch_simulation_field(sim: *const CchSimulation, buf: *mut f64, len: usize) -> CchStatus {
    guard(|| {
        let Some(s) = sim.as_ref() else {
            return fail(CchStatus::NullPointer, "sim is NULL");
        };
        if buf.is_null() {
            return fail(CchStatus::NullPointer, "buf is NULL");
        }
        let field = s.sim.discretization().to_physical(s.sim.field());
        let values = field.physical().expect("physical field");
        if len < values.len() {
            return fail(CchStatus::BufferTooSmall, format!("need {} values, got {len}", values.len()));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        CchStatus::Ok
    })
}

/// Admissible weight window for cross-section dimension `n` and first
/// nonzero eigenvalue `lambda1 < 0`.
///
/// # Safety
/// `lo` and `hi` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cch_gamma_window(n: u32, lambda1: f64, lo: *mut f64, hi: *mut f64) -> CchStatus {
    guard(|| {
        if lo.is_null() || hi.is_null() {
            return fail(CchStatus::NullPointer, "lo or hi is NULL");
        }
        match indicial::gamma_window(n, lambda1) {
            Ok((a, b)) => {
                *lo = a;
                *hi = b;
                CchStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Indicial report of the model cone as a JSON string; release it with
/// [`cch_string_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cch_indicial_report_json(n: u32, alpha: f64, gamma: f64, out: *mut *mut c_char) -> CchStatus {
    guard(|| {
        if out.is_null() {
            return fail(CchStatus::NullPointer, "out is NULL");
        }
        *out = ptr::null_mut();
        match indicial::cone_report(n, alpha, gamma) {
            Ok(r) => {
                let json = serde_json::to_string(&r).expect("report serializes");
                *out = CString::new(json).expect("no interior NUL").into_raw();
                CchStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
