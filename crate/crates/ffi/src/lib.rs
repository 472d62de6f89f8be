//! C ABI over `parking_ilu`.
//!
//! Objects are opaque heap handles created by `*_new` functions and released
//! with the matching `*_free`. Every fallible function returns a
//! [`PiluStatus`]; on failure, [`pilu_last_error_message`] describes the error
//! on the calling thread. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use parking_ilu::bounds::BoundReport;
use parking_ilu::ilu::IluState;
use parking_ilu::simulate::RngStream;
use parking_ilu::{EnvironmentParams, Error, Family, IntensityModel, Oracle, Tolerances};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiluStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    ClassViolation = 4,
    EmptyRecords = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

impl From<&Error> for PiluStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Config(_) => PiluStatus::InvalidArgument,
            Error::Domain { .. } => PiluStatus::Domain,
            Error::EmptyClass { .. } | Error::ClassViolation(_) => PiluStatus::ClassViolation,
            Error::EmptyRecords => PiluStatus::EmptyRecords,
            Error::CandidateCap { .. } | Error::Numerical(_) | Error::InsufficientSamples { .. } => {
                PiluStatus::Numerical
            }
            Error::Io(_) => PiluStatus::Io,
        }
    }
}

/// An intensity model bound to its environment.
pub struct PiluModel {
    model: IntensityModel,
}

/// Solved optimal-stopping problem for one model.
pub struct PiluOracle {
    oracle: Oracle,
}

/// Learner state of one ILU replication.
pub struct PiluIlu {
    state: IluState,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PiluOracleResult {
    pub b_star: f64,
    pub tail_mean: f64,
    pub expected_cost_at_star: f64,
    pub residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PiluBounds {
    pub lower_bound: f64,
    pub b_star_min: f64,
    pub c_upper: f64,
    pub upper_constant: f64,
    pub mse_coefficient: f64,
    pub c: f64,
    pub c_tilde: f64,
    pub c_prime: f64,
    pub c_lower: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PiluStep {
    pub round: u64,
    pub threshold: f64,
    pub stop: f64,
    pub full_information: bool,
    /// Full-information records after the round.
    pub records: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PiluStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(PiluStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PiluStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PiluStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PiluStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside parking_ilu".into());
            PiluStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pilu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pilu_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a model from a family expression such as `"constant(1.0)"` or
/// `"sinusoidal(1.5, 0.3, 1.0)"`. Class membership is not checked here.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_model_new(
    street_start: f64,
    class_bound: f64,
    expr: *const c_char,
    out: *mut *mut PiluModel,
) -> PiluStatus {
    guard(|| {
        if expr.is_null() {
            return Err(null("expr"));
        }
        let text = CStr::from_ptr(expr)
            .to_str()
            .map_err(|_| Failure(PiluStatus::InvalidArgument, "expr is not UTF-8".into()))?;
        let family: Family = text.parse()?;
        let env = EnvironmentParams::new(street_start, class_bound)?;
        let model = IntensityModel::new(family, env)?;
        write(out, Box::into_raw(Box::new(PiluModel { model })), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_model_new_constant(
    street_start: f64,
    class_bound: f64,
    rate: f64,
    out: *mut *mut PiluModel,
) -> PiluStatus {
    guard(|| {
        let env = EnvironmentParams::new(street_start, class_bound)?;
        let model = IntensityModel::constant(rate, env)?;
        write(out, Box::into_raw(Box::new(PiluModel { model })), "out")
    })
}

/// # Safety
/// `model` must come from a `pilu_model_new*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pilu_model_free(model: *mut PiluModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `PILU_STATUS_OK` when the model belongs to the class, otherwise
/// `PILU_STATUS_CLASS_VIOLATION` with the violated property in the message.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pilu_model_validate(model: *const PiluModel) -> PiluStatus {
    guard(|| {
        deref(model, "model")?.model.validate().into_result()?;
        Ok(())
    })
}

/// `λ(u)` for `u ≥ S`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_model_evaluate(model: *const PiluModel, u: f64, out: *mut f64) -> PiluStatus {
    guard(|| {
        let v = deref(model, "model")?.model.evaluate(u)?;
        write(out, v, "out")
    })
}

/// `∫_0^y λ` for `y ≥ S`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_model_cumulative(model: *const PiluModel, y: f64, out: *mut f64) -> PiluStatus {
    guard(|| {
        let v = deref(model, "model")?.model.cumulative(y)?;
        write(out, v, "out")
    })
}

/// Solves for the optimal threshold with default tolerances. The oracle keeps
/// its own copy of the model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_oracle_new(model: *const PiluModel, out: *mut *mut PiluOracle) -> PiluStatus {
    guard(|| {
        let m = deref(model, "model")?.model.clone();
        let oracle = Oracle::new(m, Tolerances::default())?;
        write(out, Box::into_raw(Box::new(PiluOracle { oracle })), "out")
    })
}

/// # Safety
/// `oracle` must come from `pilu_oracle_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pilu_oracle_free(oracle: *mut PiluOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_oracle_result(oracle: *const PiluOracle, out: *mut PiluOracleResult) -> PiluStatus {
    guard(|| {
        let r = deref(oracle, "oracle")?.oracle.result();
        let value = PiluOracleResult {
            b_star: r.b_star,
            tail_mean: r.tail_mean,
            expected_cost_at_star: r.expected_cost_at_star,
            residual: r.residual,
        };
        write(out, value, "out")
    })
}

/// `E|τ_b|` for `b ∈ [S, 0]`.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_oracle_expected_cost(oracle: *const PiluOracle, b: f64, out: *mut f64) -> PiluStatus {
    guard(|| {
        let v = deref(oracle, "oracle")?.oracle.expected_cost(b)?;
        write(out, v, "out")
    })
}

/// Optimality gap `Δ(b) = E|τ_b| − E|τ_{b*}|`.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_oracle_gap(oracle: *const PiluOracle, b: f64, out: *mut f64) -> PiluStatus {
    guard(|| {
        let v = deref(oracle, "oracle")?.oracle.gap(b)?;
        write(out, v, "out")
    })
}

/// `Δ''(b)`.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_oracle_gap_second_derivative(
    oracle: *const PiluOracle,
    b: f64,
    out: *mut f64,
) -> PiluStatus {
    guard(|| {
        let v = deref(oracle, "oracle")?.oracle.gap_second_derivative(b)?;
        write(out, v, "out")
    })
}

/// Theoretical constants for the oracle's model and environment.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_bounds(oracle: *const PiluOracle, out: *mut PiluBounds) -> PiluStatus {
    guard(|| {
        let r = BoundReport::new(&deref(oracle, "oracle")?.oracle)?;
        let value = PiluBounds {
            lower_bound: r.upper.lower_bound,
            b_star_min: r.upper.b_star_min,
            c_upper: r.upper.c_upper,
            upper_constant: r.upper.constant,
            mse_coefficient: r.mse.coefficient,
            c: r.lower.c,
            c_tilde: r.lower.c_tilde,
            c_prime: r.lower.c_prime,
            c_lower: r.lower.c_lower,
        };
        write(out, value, "out")
    })
}

/// Fresh learner for a street starting at `street_start < 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_ilu_new(street_start: f64, out: *mut *mut PiluIlu) -> PiluStatus {
    guard(|| {
        if !(street_start.is_finite() && street_start < 0.0) {
            return Err(Failure(
                PiluStatus::InvalidArgument,
                format!("street_start {street_start} must be finite and negative"),
            ));
        }
        write(out, Box::into_raw(Box::new(PiluIlu { state: IluState::new(street_start) })), "out")
    })
}

/// # Safety
/// `ilu` must come from `pilu_ilu_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pilu_ilu_free(ilu: *mut PiluIlu) {
    if !ilu.is_null() {
        drop(Box::from_raw(ilu));
    }
}

/// Threshold the learner would play next.
///
/// # Safety
/// `ilu` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pilu_ilu_next_threshold(ilu: *const PiluIlu, out: *mut f64) -> PiluStatus {
    guard(|| {
        let v = deref(ilu, "ilu")?.state.next_threshold()?;
        write(out, v, "out")
    })
}

/// Plays one round against `model`, drawing randomness from the stream
/// `(master_seed, replication, current round)`.
///
/// # Safety
/// `ilu` and `model` must be live handles; `out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn pilu_ilu_step(
    ilu: *mut PiluIlu,
    model: *const PiluModel,
    master_seed: u64,
    replication: u64,
    out: *mut PiluStep,
) -> PiluStatus {
    guard(|| {
        let state = &mut ilu.as_mut().ok_or_else(|| null("ilu"))?.state;
        let model = &deref(model, "model")?.model;
        let stream = RngStream::new(master_seed, replication, state.round());
        let step = state.step(model, &stream)?;
        if !out.is_null() {
            out.write(PiluStep {
                round: step.round,
                threshold: step.threshold,
                stop: step.observation.stop_position,
                full_information: step.full_information,
                records: state.records().len() as u64,
            });
        }
        Ok(())
    })
}
