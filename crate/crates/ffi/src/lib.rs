//! C ABI over the weakctx toolkit.
//!
//! Conventions:
//!
//! * Scenarios are opaque handles created by [`wcx_scenario_from_json`] or
//!   [`wcx_scenario_new`] and released with [`wcx_scenario_free`].
//! * Every fallible call returns a [`WcxStatus`]; on anything other than
//!   `WCX_STATUS_OK` the thread-local message from
//!   [`wcx_last_error_message`] describes the failure.
//! * Complex buffers are interleaved doubles `re0, im0, re1, im1, ...`;
//!   matrices are row-major.
//! * Strings returned through `char**` are owned by the caller and must be
//!   released with [`wcx_string_free`].
//!
//! The header `include/weakctx.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use weakctx::contextuality::{build_nc_problem, check_conditions, nc_bound_lp};
use weakctx::hilbert::{Operator, State};
use weakctx::montecarlo::{estimate_p_minus, estimate_pass_rate, sample};
use weakctx::pointer::{abc, disturbance, p_minus, p_minus_quadrature, Scenario, TAIL_SIGMAS};
use weakctx::quad::QuadratureConfig;
use weakctx::report::{BoundReport, CheckReport, MeasureReport, WeakValueReport, XcheckReport};
use weakctx::scenario::ScenarioFile;
use weakctx::weakvalues::weak_value;
use weakctx::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcxStatus {
    /// Success.
    Ok = 0,
    /// Invalid argument or scenario data.
    InvalidArgument = 1,
    /// Numerical failure (quadrature budget, LP infeasibility).
    NumericalError = 2,
    /// A required pointer was null.
    NullPointer = 3,
    /// A panic was caught at the boundary; state is still consistent.
    Panic = 4,
}

/// Opaque scenario handle.
pub struct WcxScenario {
    inner: Scenario,
    observable: Option<Operator>,
}

/// Report selector for [`wcx_report_json`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcxReportKind {
    WeakValue = 0,
    Measure = 1,
    Check = 2,
    Xcheck = 3,
}

/// Disturbance summary of a scenario.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxMeasurement {
    /// Gaussian overlap Delta = exp(-1/4 sigma^2).
    pub delta: f64,
    /// Probability of disturbance p_d = (1 - Delta)/2.
    pub p_d: f64,
    /// Squared pointer normalization (pi sigma^2)^(-1/2).
    pub normalization_sq: f64,
    /// Total post-selection pass probability <psi|S|psi>.
    pub pass_rate: f64,
}

/// The negative-reading probability in its three flavours.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxPMinus {
    pub exact: f64,
    pub conditional: f64,
    pub asymptotic: f64,
    /// Set when `exact` leaves [0, 1] through the p_phi normalization.
    pub exact_outside_unit: bool,
}

/// Closed forms of the negative-axis noise integrals.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxAbc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Margins for the four noncontextuality-breaking conditions.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxConditionReport {
    pub p_phi: f64,
    pub p_d: f64,
    pub p_minus: f64,
    pub threshold: f64,
    pub margins: [f64; 4],
    pub all_hold: bool,
}

/// Noncontextual LP bound summary.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxNcBound {
    pub lp_optimum: f64,
    pub analytic_bound: f64,
    pub gap_to_quantum: f64,
}

/// A Monte Carlo estimate with standard error.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_effective: u64,
}

/// Monte Carlo estimates for one batch.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WcxSampleEstimates {
    pub p_minus: WcxEstimate,
    pub pass_rate: WcxEstimate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(sanitized));
}

fn status_of(error: &Error) -> WcxStatus {
    match error.exit_code() {
        2 => WcxStatus::NumericalError,
        _ => WcxStatus::InvalidArgument,
    }
}

fn fail(error: Error) -> WcxStatus {
    let status = status_of(&error);
    set_last_error(error.to_string());
    status
}

/// Runs `f` behind a panic guard, translating panics into [`WcxStatus::Panic`].
fn guarded(f: impl FnOnce() -> WcxStatus) -> WcxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("panic at FFI boundary: {message}"));
            WcxStatus::Panic
        }
    }
}

/// Last error message for this thread, or null if none was recorded. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wcx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(ptr::null())
    })
}

unsafe fn scenario_ref<'a>(handle: *const WcxScenario) -> Option<&'a WcxScenario> {
    handle.as_ref()
}

fn boxed(scenario: Scenario, observable: Option<Operator>) -> *mut WcxScenario {
    Box::into_raw(Box::new(WcxScenario {
        inner: scenario,
        observable,
    }))
}

/// Parses a scenario from the JSON schema used by the CLI.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wcx_scenario_from_json(
    json: *const c_char,
    out: *mut *mut WcxScenario,
) -> WcxStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return WcxStatus::NullPointer;
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_last_error("scenario JSON is not valid UTF-8".into());
                return WcxStatus::InvalidArgument;
            }
        };
        let parsed = ScenarioFile::from_json_str(text).and_then(|f| f.to_scenario(None));
        match parsed {
            Ok((scenario, observable)) => {
                unsafe { *out = boxed(scenario, observable) };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds a scenario from raw buffers: `psi` and `phi` hold `2*dim`
/// interleaved doubles, `pi` holds `2*dim*dim` row-major interleaved doubles.
///
/// # Safety
/// The buffers must match the advertised lengths; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_scenario_new(
    dim: usize,
    psi: *const f64,
    phi: *const f64,
    pi: *const f64,
    sigma: f64,
    out: *mut *mut WcxScenario,
) -> WcxStatus {
    guarded(|| {
        if psi.is_null() || phi.is_null() || pi.is_null() || out.is_null() {
            return WcxStatus::NullPointer;
        }
        if !(2..=64).contains(&dim) {
            set_last_error(format!("dimension {dim} out of supported range 2..=64"));
            return WcxStatus::InvalidArgument;
        }
        let read_vector = |ptr: *const f64| -> Vec<Complex64> {
            let raw = unsafe { std::slice::from_raw_parts(ptr, 2 * dim) };
            raw.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect()
        };
        let psi = read_vector(psi);
        let phi = read_vector(phi);
        let raw = unsafe { std::slice::from_raw_parts(pi, 2 * dim * dim) };
        let rows: Vec<Vec<Complex64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let base = 2 * (i * dim + j);
                        Complex64::new(raw[base], raw[base + 1])
                    })
                    .collect()
            })
            .collect();
        let build = || -> weakctx::Result<Scenario> {
            let psi = State::new(psi)?;
            let phi = State::new(phi)?;
            let pi = Operator::from_rows(rows)?;
            Scenario::new(psi, phi, pi, sigma)
        };
        match build() {
            Ok(scenario) => {
                unsafe { *out = boxed(scenario, None) };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Clones a scenario with a different pointer width.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_scenario_with_sigma(
    scenario: *const WcxScenario,
    sigma: f64,
    out: *mut *mut WcxScenario,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        match handle.inner.with_sigma(sigma) {
            Ok(s) => {
                unsafe { *out = boxed(s, handle.observable.clone()) };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a scenario handle. Null is ignored.
///
/// # Safety
/// `scenario` must have been returned by a constructor and not freed before.
#[no_mangle]
pub unsafe extern "C" fn wcx_scenario_free(scenario: *mut WcxScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Hilbert-space dimension of the scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_scenario_dim(
    scenario: *const WcxScenario,
    out: *mut usize,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        unsafe { *out = handle.inner.dim() };
        WcxStatus::Ok
    })
}

/// Post-selection probability `p_phi`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_scenario_p_phi(
    scenario: *const WcxScenario,
    out: *mut f64,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        unsafe { *out = handle.inner.p_phi() };
        WcxStatus::Ok
    })
}

/// Weak value of the scenario observable (the measured projector when the
/// scenario carries no explicit observable).
///
/// # Safety
/// `scenario` must be a live handle; `out_re`/`out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_weak_value(
    scenario: *const WcxScenario,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (
            unsafe { scenario_ref(scenario) },
            out_re.is_null() || out_im.is_null(),
        ) else {
            return WcxStatus::NullPointer;
        };
        let operator = handle
            .observable
            .as_ref()
            .unwrap_or_else(|| handle.inner.pi());
        match weak_value(operator, handle.inner.psi(), handle.inner.phi()) {
            Ok(w) => {
                unsafe {
                    *out_re = w.value.re;
                    *out_im = w.value.im;
                }
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Weak value of the measured projector itself.
///
/// # Safety
/// `scenario` must be a live handle; `out_re`/`out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_projector_weak_value(
    scenario: *const WcxScenario,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (
            unsafe { scenario_ref(scenario) },
            out_re.is_null() || out_im.is_null(),
        ) else {
            return WcxStatus::NullPointer;
        };
        let w = handle.inner.pi_weak_value();
        unsafe {
            *out_re = w.re;
            *out_im = w.im;
        }
        WcxStatus::Ok
    })
}

/// Closed forms of the A, B, C integrals at pointer width `sigma`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_abc(sigma: f64, out: *mut WcxAbc) -> WcxStatus {
    guarded(|| {
        if out.is_null() {
            return WcxStatus::NullPointer;
        }
        match abc(sigma) {
            Ok(v) => {
                unsafe {
                    *out = WcxAbc {
                        a: v.a,
                        b: v.b,
                        c: v.c,
                    }
                };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Disturbance summary (Delta, p_d, normalization, pass rate).
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_measurement(
    scenario: *const WcxScenario,
    out: *mut WcxMeasurement,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let m = disturbance(&handle.inner);
        unsafe {
            *out = WcxMeasurement {
                delta: m.delta,
                p_d: m.p_d,
                normalization_sq: m.normalization_sq,
                pass_rate: m.s_expectation(),
            }
        };
        WcxStatus::Ok
    })
}

unsafe fn write_operator(op: &Operator, out: *mut f64) {
    let d = op.dim();
    for i in 0..d {
        for j in 0..d {
            let v = op.get(i, j);
            let base = 2 * (i * d + j);
            unsafe {
                *out.add(base) = v.re;
                *out.add(base + 1) = v.im;
            }
        }
    }
}

/// Writes the disturbed effect `E_d` into `out` (`2*dim*dim` doubles,
/// row-major interleaved).
///
/// # Safety
/// `scenario` must be a live handle; `out` must hold `2*dim*dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn wcx_disturbed_effect(
    scenario: *const WcxScenario,
    out: *mut f64,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        unsafe { write_operator(&disturbance(&handle.inner).e_d, out) };
        WcxStatus::Ok
    })
}

/// Writes the averaged post-selection effect `S` into `out` (`2*dim*dim`
/// doubles, row-major interleaved).
///
/// # Safety
/// `scenario` must be a live handle; `out` must hold `2*dim*dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn wcx_averaged_effect(
    scenario: *const WcxScenario,
    out: *mut f64,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        unsafe { write_operator(&disturbance(&handle.inner).s, out) };
        WcxStatus::Ok
    })
}

/// Closed-form `p_-` in all three flavours.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_p_minus(
    scenario: *const WcxScenario,
    out: *mut WcxPMinus,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let p = p_minus(&handle.inner);
        unsafe {
            *out = WcxPMinus {
                exact: p.exact,
                conditional: p.conditional,
                asymptotic: p.asymptotic,
                exact_outside_unit: p.exact_outside_unit,
            }
        };
        WcxStatus::Ok
    })
}

/// `p_-` by adaptive quadrature of the defining integral.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_p_minus_quadrature(
    scenario: *const WcxScenario,
    out: *mut f64,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        match p_minus_quadrature(&handle.inner) {
            Ok(v) => {
                unsafe { *out = v };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Margins for the four noncontextuality-breaking conditions.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_check_conditions(
    scenario: *const WcxScenario,
    out: *mut WcxConditionReport,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let report = check_conditions(&handle.inner);
        unsafe {
            *out = WcxConditionReport {
                p_phi: report.p_phi,
                p_d: report.p_d,
                p_minus: report.p_minus,
                threshold: report.threshold,
                margins: report.margins,
                all_hold: report.all_hold,
            }
        };
        WcxStatus::Ok
    })
}

/// Maximal noncontextual `p_-` via the LP with `n_bins` pointer bins.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_nc_bound(
    scenario: *const WcxScenario,
    n_bins: usize,
    out: *mut WcxNcBound,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let solve = || -> weakctx::Result<weakctx::NcBoundResult> {
            nc_bound_lp(&build_nc_problem(&handle.inner, n_bins)?)
        };
        match solve() {
            Ok(result) => {
                unsafe {
                    *out = WcxNcBound {
                        lp_optimum: result.lp_optimum,
                        analytic_bound: result.analytic_bound,
                        gap_to_quantum: result.gap_to_quantum,
                    }
                };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Draws `n` Monte Carlo events at `seed` and reports estimates.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wcx_sample_estimates(
    scenario: *const WcxScenario,
    n: u64,
    seed: u64,
    out: *mut WcxSampleEstimates,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let run = || -> weakctx::Result<WcxSampleEstimates> {
            let batch = sample(&handle.inner, n as usize, seed)?;
            let p = estimate_p_minus(&batch, &handle.inner)?;
            let pass = estimate_pass_rate(&batch)?;
            Ok(WcxSampleEstimates {
                p_minus: WcxEstimate {
                    value: p.value,
                    std_error: p.std_error,
                    n_effective: p.n_effective as u64,
                },
                pass_rate: WcxEstimate {
                    value: pass.value,
                    std_error: pass.std_error,
                    n_effective: pass.n_effective as u64,
                },
            })
        };
        match run() {
            Ok(estimates) => {
                unsafe { *out = estimates };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds one of the CLI's JSON reports and returns it as an owned string.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid. The result must be
/// released with [`wcx_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wcx_report_json(
    scenario: *const WcxScenario,
    kind: WcxReportKind,
    out: *mut *mut c_char,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let built: weakctx::Result<String> = (|| {
            let json = match kind {
                WcxReportKind::WeakValue => serde_json::to_string_pretty(&WeakValueReport::build(
                    &handle.inner,
                    handle.observable.as_ref(),
                )?),
                WcxReportKind::Measure => {
                    serde_json::to_string_pretty(&MeasureReport::build(&handle.inner))
                }
                WcxReportKind::Check => {
                    serde_json::to_string_pretty(&CheckReport::build(&handle.inner))
                }
                WcxReportKind::Xcheck => serde_json::to_string_pretty(&XcheckReport::build(
                    &handle.inner,
                    &QuadratureConfig::default(),
                    TAIL_SIGMAS,
                    1e-9,
                )?),
            };
            json.map_err(|e| Error::InvalidInput(format!("serialization: {e}")))
        })();
        match built {
            Ok(text) => {
                let c = CString::new(text).expect("JSON contains no NUL bytes");
                unsafe { *out = c.into_raw() };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Noncontextual-bound report (with certificate) as an owned JSON string.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid. Release the string
/// with [`wcx_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wcx_bound_json(
    scenario: *const WcxScenario,
    n_bins: usize,
    out: *mut *mut c_char,
) -> WcxStatus {
    guarded(|| {
        let (Some(handle), false) = (unsafe { scenario_ref(scenario) }, out.is_null()) else {
            return WcxStatus::NullPointer;
        };
        let built = BoundReport::build(&handle.inner, n_bins, TAIL_SIGMAS).and_then(|r| {
            serde_json::to_string_pretty(&r)
                .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))
        });
        match built {
            Ok(text) => {
                let c = CString::new(text).expect("JSON contains no NUL bytes");
                unsafe { *out = c.into_raw() };
                WcxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn wcx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
