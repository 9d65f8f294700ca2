// Copyright 2026 the wheelbks developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! C ABI for the wheelbks library.
//!
//! Conventions: every fallible call returns a [`WheelbksStatus`]; results
//! come back through out-pointers that are written only on
//! `WHEELBKS_STATUS_OK`. Handles are opaque and must be released with
//! their matching `_free` function; strings returned by the library are
//! released with [`wheelbks_string_free`]. A failure description for the
//! current thread is available via [`wheelbks_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use wheelbks::analysis::{propagate, DataSetTable, Method, PropagationConfig};
use wheelbks::error::{AnalysisError, SimError, WeakValueError, WheelError};
use wheelbks::interfsim::{reference_config, run_pipeline};
use wheelbks::qalg::SpinState;
use wheelbks::weakval::{forbidden_projector_wv, witness_c, BasisIndex, WeakValue};
use wheelbks::wheel::{
    build_wheel, prove_no_nchv_gf2, verify_context_products, Gf2Outcome, WheelSet,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WheelbksStatus {
    WheelbksStatusOk = 0,
    /// An argument is out of the supported domain.
    WheelbksStatusUsageError = 1,
    /// Input data failed to parse or validate.
    WheelbksStatusDataError = 2,
    /// A numerical procedure failed (singular system, divergence).
    WheelbksStatusNumericalError = 3,
    /// A required pointer was null.
    WheelbksStatusNullPointer = 4,
}

use WheelbksStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: WheelbksStatus, message: &str) -> WheelbksStatus {
    let owned = CString::new(message.replace('\0', "?")).expect("NULs replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
    status
}

fn fail_null(what: &str) -> WheelbksStatus {
    fail(WheelbksStatusNullPointer, &format!("{} is null", what))
}

impl From<&WheelError> for WheelbksStatus {
    fn from(e: &WheelError) -> WheelbksStatus {
        match e {
            WheelError::BadSize(_) | WheelError::ExhaustiveCapExceeded { .. } => {
                WheelbksStatusUsageError
            }
            WheelError::MalformedSet(_) | WheelError::Json(_) => WheelbksStatusDataError,
            WheelError::Algebra(_) => WheelbksStatusNumericalError,
        }
    }
}

impl From<&WeakValueError> for WheelbksStatus {
    fn from(e: &WeakValueError) -> WheelbksStatus {
        match e {
            WeakValueError::BadSpinCount(_)
            | WeakValueError::IndexOutOfRange { .. }
            | WeakValueError::LengthMismatch { .. } => WheelbksStatusUsageError,
            WeakValueError::SingularOverlap { .. }
            | WeakValueError::IncompleteBasis { .. }
            | WeakValueError::Algebra(_) => WheelbksStatusNumericalError,
        }
    }
}

impl From<&AnalysisError> for WheelbksStatus {
    fn from(e: &AnalysisError) -> WheelbksStatus {
        match e {
            AnalysisError::TooFewSamples { .. } => WheelbksStatusUsageError,
            AnalysisError::WeakValue(inner) => inner.into(),
            AnalysisError::WrongRowCount { .. }
            | AnalysisError::BadRow { .. }
            | AnalysisError::NonPositiveSigma { .. }
            | AnalysisError::Io(_) => WheelbksStatusDataError,
        }
    }
}

impl From<&SimError> for WheelbksStatus {
    fn from(e: &SimError) -> WheelbksStatus {
        match e {
            SimError::BadAlpha(_) | SimError::BadMeanCounts(_) => WheelbksStatusUsageError,
            SimError::EmptyChiGrid | SimError::TooFewPoints { .. } | SimError::BadChiSpan { .. } => {
                WheelbksStatusDataError
            }
            SimError::FitDidNotConverge { .. }
            | SimError::SingularExtraction(_)
            | SimError::Algebra(_) => WheelbksStatusNumericalError,
        }
    }
}

fn fail_with<E>(e: &E) -> WheelbksStatus
where
    E: std::fmt::Display,
    for<'a> &'a E: Into<WheelbksStatus>,
{
    fail(e.into(), &e.to_string())
}

/// A complex estimate with per-component one-sigma uncertainties.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WheelbksEstimate {
    pub re: f64,
    pub re_sigma: f64,
    pub im: f64,
    pub im_sigma: f64,
}

/// Uncertainty propagation scheme.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WheelbksMethod {
    WheelbksMethodFirstOrder = 0,
    WheelbksMethodMonteCarlo = 1,
}

/// Opaque handle to a Wheel observable set.
pub struct WheelbksWheel(WheelSet);

/// Opaque handle to a table of measured single-set weak values.
pub struct WheelbksTable(DataSetTable);

/// Returns the most recent failure description on this thread, or null if
/// no call has failed. The caller owns the string and must release it with
/// [`wheelbks_string_free`].
#[no_mangle]
pub extern "C" fn wheelbks_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have been returned by a wheelbks function and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the N-spin Wheel set (odd N >= 3) and stores a handle in `out`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_wheel_build(
    n: usize,
    out: *mut *mut WheelbksWheel,
) -> WheelbksStatus {
    if out.is_null() {
        return fail_null("out");
    }
    match build_wheel(n) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(WheelbksWheel(set)));
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Releases a wheel handle. Null is ignored.
///
/// # Safety
/// `wheel` must have come from [`wheelbks_wheel_build`] and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_wheel_free(wheel: *mut WheelbksWheel) {
    if !wheel.is_null() {
        drop(Box::from_raw(wheel));
    }
}

/// Writes the number of observables and contexts of the set.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_wheel_shape(
    wheel: *const WheelbksWheel,
    observables: *mut usize,
    contexts: *mut usize,
) -> WheelbksStatus {
    let Some(w) = wheel.as_ref() else {
        return fail_null("wheel");
    };
    if observables.is_null() || contexts.is_null() {
        return fail_null("out");
    }
    *observables = w.0.observable_count();
    *contexts = w.0.context_count();
    WheelbksStatusOk
}

/// Multiplies out every context symbolically; `ok` becomes true when all
/// ring products are +identity and all spoke products are -identity.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_wheel_verify(
    wheel: *const WheelbksWheel,
    ok: *mut bool,
) -> WheelbksStatus {
    let Some(w) = wheel.as_ref() else {
        return fail_null("wheel");
    };
    if ok.is_null() {
        return fail_null("ok");
    }
    match verify_context_products(&w.0) {
        Ok(report) => {
            *ok = report.all_ok;
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Runs the GF(2) prover; `inconsistent` becomes true when no
/// noncontextual value assignment satisfies the set.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_wheel_nchv_inconsistent(
    wheel: *const WheelbksWheel,
    inconsistent: *mut bool,
) -> WheelbksStatus {
    let Some(w) = wheel.as_ref() else {
        return fail_null("wheel");
    };
    if inconsistent.is_null() {
        return fail_null("inconsistent");
    }
    match prove_no_nchv_gf2(&w.0) {
        Ok(outcome) => {
            *inconsistent = matches!(outcome, Gf2Outcome::Inconsistent { .. });
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Serializes the set to JSON. The caller frees the string with
/// [`wheelbks_string_free`].
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_wheel_to_json(
    wheel: *const WheelbksWheel,
    out: *mut *mut c_char,
) -> WheelbksStatus {
    let Some(w) = wheel.as_ref() else {
        return fail_null("wheel");
    };
    if out.is_null() {
        return fail_null("out");
    }
    let text = w.0.to_json();
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            WheelbksStatusOk
        }
        Err(_) => fail(WheelbksStatusDataError, "serialized set contains NUL"),
    }
}

unsafe fn read_zw(
    n: usize,
    zw_re: *const f64,
    zw_im: *const f64,
) -> Result<Vec<WeakValue>, WheelbksStatus> {
    if zw_re.is_null() || zw_im.is_null() {
        return Err(fail_null("zw"));
    }
    let re = std::slice::from_raw_parts(zw_re, n);
    let im = std::slice::from_raw_parts(zw_im, n);
    Ok(re
        .iter()
        .zip(im)
        .map(|(&r, &i)| WeakValue::new(r, i))
        .collect())
}

/// Contextuality witness C from n single-set weak values given as
/// parallel length-n arrays of real and imaginary parts.
///
/// # Safety
/// `zw_re` and `zw_im` must point to `n` readable doubles; the out
/// pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_witness(
    n: usize,
    zw_re: *const f64,
    zw_im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WheelbksStatus {
    if out_re.is_null() || out_im.is_null() {
        return fail_null("out");
    }
    let zw = match read_zw(n, zw_re, zw_im) {
        Ok(zw) => zw,
        Err(status) => return status,
    };
    match witness_c(n, &zw) {
        Ok(c) => {
            *out_re = c.re;
            *out_im = c.im;
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Weak value of forbidden projector j (0 <= j < 2^(n-1)) from n
/// single-set weak values.
///
/// # Safety
/// Same contract as [`wheelbks_witness`].
#[no_mangle]
pub unsafe extern "C" fn wheelbks_projector(
    n: usize,
    j: u64,
    zw_re: *const f64,
    zw_im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WheelbksStatus {
    if out_re.is_null() || out_im.is_null() {
        return fail_null("out");
    }
    let zw = match read_zw(n, zw_re, zw_im) {
        Ok(zw) => zw,
        Err(status) => return status,
    };
    let idx = match BasisIndex::new(n, j) {
        Ok(idx) => idx,
        Err(e) => return fail_with(&e),
    };
    match forbidden_projector_wv(&idx, &zw) {
        Ok(p) => {
            *out_re = p.re;
            *out_im = p.im;
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Stores a handle to the bundled 17-set measured table in `out`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_table_bundled(out: *mut *mut WheelbksTable) -> WheelbksStatus {
    if out.is_null() {
        return fail_null("out");
    }
    *out = Box::into_raw(Box::new(WheelbksTable(DataSetTable::bundled())));
    WheelbksStatusOk
}

/// Parses a measured table from CSV text
/// (`set_id,re,re_sigma,im,im_sigma`) and stores a handle in `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_table_from_csv(
    text: *const c_char,
    out: *mut *mut WheelbksTable,
) -> WheelbksStatus {
    if out.is_null() {
        return fail_null("out");
    }
    if text.is_null() {
        return fail_null("text");
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return fail(WheelbksStatusDataError, "table text is not valid UTF-8");
    };
    match DataSetTable::from_csv(text) {
        Ok(table) => {
            *out = Box::into_raw(Box::new(WheelbksTable(table)));
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Releases a table handle. Null is ignored.
///
/// # Safety
/// `table` must have come from a table constructor and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_table_free(table: *mut WheelbksTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Writes the number of rows in the table.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_table_len(
    table: *const WheelbksTable,
    len: *mut usize,
) -> WheelbksStatus {
    let Some(t) = table.as_ref() else {
        return fail_null("table");
    };
    if len.is_null() {
        return fail_null("len");
    }
    *len = t.0.len();
    WheelbksStatusOk
}

fn propagation_config(
    method: WheelbksMethod,
    mc_samples: usize,
    seed: u64,
    threads: usize,
) -> PropagationConfig {
    PropagationConfig {
        method: match method {
            WheelbksMethod::WheelbksMethodFirstOrder => Method::FirstOrder,
            WheelbksMethod::WheelbksMethodMonteCarlo => Method::MonteCarlo,
        },
        mc_samples,
        seed,
        threads,
    }
}

unsafe fn propagate_into(
    table: *const WheelbksTable,
    n: usize,
    eval: impl Fn(&[WeakValue]) -> Result<WeakValue, WeakValueError> + Sync,
    cfg: &PropagationConfig,
    out: *mut WheelbksEstimate,
) -> WheelbksStatus {
    let Some(t) = table.as_ref() else {
        return fail_null("table");
    };
    if out.is_null() {
        return fail_null("out");
    }
    if n > t.0.len() {
        return fail(
            WheelbksStatusUsageError,
            &format!("n = {} exceeds the table's {} rows", n, t.0.len()),
        );
    }
    let subset: Vec<usize> = (1..=n).collect();
    match propagate(
        |zw| eval(zw).expect("subset length matches n"),
        &t.0,
        &subset,
        cfg,
    ) {
        Ok(p) => {
            *out = WheelbksEstimate {
                re: p.value.re,
                re_sigma: p.sigma_re,
                im: p.value.im,
                im_sigma: p.sigma_im,
            };
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}

/// Contextuality witness over table rows 1..=n with propagated
/// uncertainties. `mc_samples` and `threads` only matter for the
/// Monte Carlo method.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_witness_propagated(
    table: *const WheelbksTable,
    n: usize,
    method: WheelbksMethod,
    mc_samples: usize,
    seed: u64,
    threads: usize,
    out: *mut WheelbksEstimate,
) -> WheelbksStatus {
    let cfg = propagation_config(method, mc_samples, seed, threads);
    propagate_into(table, n, |zw| witness_c(n, zw), &cfg, out)
}

/// Forbidden-projector weak value over table rows 1..=n with propagated
/// uncertainties.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_projector_propagated(
    table: *const WheelbksTable,
    n: usize,
    j: u64,
    method: WheelbksMethod,
    mc_samples: usize,
    seed: u64,
    threads: usize,
    out: *mut WheelbksEstimate,
) -> WheelbksStatus {
    let idx = match BasisIndex::new(n, j) {
        Ok(idx) => idx,
        Err(e) => return fail_with(&e),
    };
    let cfg = propagation_config(method, mc_samples, seed, threads);
    propagate_into(table, n, |zw| forbidden_projector_wv(&idx, zw), &cfg, out)
}

/// Simulates one seeded interferometric acquisition at `alpha_deg` and
/// extracts the spin weak value (ideal answer: re 0, im 1).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wheelbks_simulate_extract(
    alpha_deg: f64,
    seed: u64,
    out: *mut WheelbksEstimate,
) -> WheelbksStatus {
    if out.is_null() {
        return fail_null("out");
    }
    let mut cfg = reference_config(seed);
    cfg.alpha_deg = alpha_deg;
    cfg.subtract_orthogonal_bg = true;
    match run_pipeline(&cfg, &SpinState::plus_x(), &SpinState::plus_y()) {
        Ok(result) => {
            let m = result.measured;
            *out = WheelbksEstimate {
                re: m.re,
                re_sigma: m.re_sigma,
                im: m.im,
                im_sigma: m.im_sigma,
            };
            WheelbksStatusOk
        }
        Err(e) => fail_with(&e),
    }
}
