//! C interface. Chains are opaque handles built from a JSON description;
//! every call returns a `PmStatus` and writes results through out-pointers.
//! The message for the last failure on the calling thread is available from
//! `pm_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polymix::chains::ChainSpec;
use polymix::convergence::{mixing_bounds, steps_to_epsilon, SpectralSum};
use polymix::numerics::ExactScalar;
use polymix::spectra::{eigenvalue, max_degree, multiplicity};
use polymix::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Capacity = 4,
    Unsupported = 5,
    Parse = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// Opaque chain handle.
pub struct PmChain {
    spec: ChainSpec,
}

/// Step thresholds from a corner start.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PmBound {
    pub upper: f64,
    pub upper_level: f64,
    pub lower: f64,
    pub lower_level: f64,
    pub rate: f64,
    /// NaN when there is no large-N form.
    pub asymptotic: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> PmStatus {
    match err {
        Error::InvalidParameter(_) => PmStatus::InvalidArgument,
        Error::Domain(_) | Error::Pole(_) | Error::LinearAlgebra(_) => PmStatus::Domain,
        Error::Capacity { .. } => PmStatus::Capacity,
        Error::Unsupported(_) => PmStatus::Unsupported,
        Error::Parse(_) | Error::Io(_) => PmStatus::Parse,
    }
}

/// Runs `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (PmStatus, String)>) -> PmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PmStatus::Internal
        }
    }
}

fn lift(err: Error) -> (PmStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (PmStatus, String) {
    (PmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn chain_ref<'a>(chain: *const PmChain) -> Result<&'a PmChain, (PmStatus, String)> {
    // SAFETY: non-null handles come from pm_chain_from_json and are live per the contract.
    unsafe { chain.as_ref() }.ok_or_else(|| null("chain"))
}

unsafe fn counts<'a>(start: *const u64, len: usize) -> Result<&'a [u64], (PmStatus, String)> {
    if start.is_null() {
        return Err(null("start"));
    }
    // SAFETY: caller passes `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(start, len) })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread; empty if none.
#[no_mangle]
pub extern "C" fn pm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a chain from JSON such as
/// `{"family":"moran","n":20,"m":"1/21","p":["1/5","1/5","1/5","1/5","1/5"]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer. The
/// handle written to `out` must be released with `pm_chain_free`.
#[no_mangle]
pub unsafe extern "C" fn pm_chain_from_json(json: *const c_char, out: *mut *mut PmChain) -> PmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: checked non-null; caller guarantees NUL termination.
        let text = unsafe { CStr::from_ptr(json) }.to_str().map_err(|e| (PmStatus::Parse, e.to_string()))?;
        let spec: ChainSpec = serde_json::from_str(text).map_err(|e| (PmStatus::Parse, e.to_string()))?;
        spec.validate().map_err(lift)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(PmChain { spec })) };
        Ok(())
    })
}

/// # Safety
/// `chain` must be null or a handle from `pm_chain_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_chain_free(chain: *mut PmChain) {
    if !chain.is_null() {
        // SAFETY: the handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(chain) });
    }
}

/// Number of colors (or AR dimension) and population (0 for AR).
///
/// # Safety
/// `chain` must be a live handle; `dim` and `population` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_chain_shape(chain: *const PmChain, dim: *mut usize, population: *mut u64) -> PmStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        if dim.is_null() || population.is_null() {
            return Err(null("out"));
        }
        unsafe {
            *dim = c.spec.dim();
            *population = c.spec.population();
        }
        Ok(())
    })
}

/// Largest eigenvalue degree.
///
/// # Safety
/// `chain` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_max_degree(chain: *const PmChain, out: *mut u64) -> PmStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        if !c.spec.is_finite() {
            return Err((PmStatus::Unsupported, "the AR process has no degree ladder".into()));
        }
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = max_degree(&c.spec);
        Ok(())
    })
}

/// Eigenvalue `beta_n` and its multiplicity (saturating at `UINT64_MAX`).
///
/// # Safety
/// `chain` must be a live handle; `beta` and `mult` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_eigenvalue(chain: *const PmChain, n: u64, beta: *mut f64, mult: *mut u64) -> PmStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        if beta.is_null() || mult.is_null() {
            return Err(null("out"));
        }
        if !c.spec.is_finite() {
            return Err((PmStatus::Unsupported, "use the AR spectrum".into()));
        }
        let b: ExactScalar = eigenvalue(&c.spec, n).map_err(lift)?;
        let m = multiplicity(&c.spec, n);
        unsafe {
            *beta = polymix::numerics::ratio_to_f64(&b);
            *mult = polymix::numerics::biguint_to_u64(&m).unwrap_or(u64::MAX);
        }
        Ok(())
    })
}

/// Chi-square distance after `l_i` steps for each of `count` step counts.
///
/// # Safety
/// `chain` must be a live handle, `start` must hold `start_len` counts,
/// `steps` `count` entries, and `out` room for `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn pm_chisq(
    chain: *const PmChain,
    start: *const u64,
    start_len: usize,
    steps: *const u64,
    count: usize,
    out: *mut f64,
) -> PmStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        let x = unsafe { counts(start, start_len) }?;
        if steps.is_null() || out.is_null() {
            return Err(null("steps or out"));
        }
        let sum = SpectralSum::new(&c.spec, x).map_err(lift)?;
        // SAFETY: caller provides `count` elements in both buffers.
        let (steps, out) = unsafe { (std::slice::from_raw_parts(steps, count), std::slice::from_raw_parts_mut(out, count)) };
        for (o, &l) in out.iter_mut().zip(steps) {
            *o = sum.eval(l);
        }
        Ok(())
    })
}

/// First step with chi-square at most `eps`.
///
/// # Safety
/// As for `pm_chisq`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_steps_to_epsilon(
    chain: *const PmChain,
    start: *const u64,
    start_len: usize,
    eps: f64,
    out: *mut u64,
) -> PmStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        let x = unsafe { counts(start, start_len) }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = steps_to_epsilon(&c.spec, x, eps).map_err(lift)?;
        Ok(())
    })
}

/// Closed-form thresholds for the start `N e_{color+1}` (0-based `color`).
///
/// # Safety
/// `chain` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pm_mixing_bounds(chain: *const PmChain, color: usize, c: f64, out: *mut PmBound) -> PmStatus {
    guard(|| {
        let ch = unsafe { chain_ref(chain) }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let b = mixing_bounds(&ch.spec, color, c).map_err(lift)?;
        *out = PmBound {
            upper: b.upper,
            upper_level: b.upper_level,
            lower: b.lower,
            lower_level: b.lower_level,
            rate: b.rate,
            asymptotic: b.asymptotic.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes_map() {
        assert_eq!(status_of(&Error::InvalidParameter("x".into())), PmStatus::InvalidArgument);
        assert_eq!(status_of(&Error::Parse("x".into())), PmStatus::Parse);
        assert_eq!(guard(|| panic!("boom")), PmStatus::Internal);
        let msg = unsafe { CStr::from_ptr(pm_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }
}
