//! C interface to the congest simulator.
//!
//! Scenarios and simulations are opaque handles created and destroyed
//! through this API. Every fallible function returns a [`CongestStatus`];
//! on failure a human-readable message is available from
//! [`congest_last_error_message`] on the same thread until the next failing
//! call. Panics never cross the boundary: they are reported as
//! `CONGEST_STATUS_PANIC`.
//!
//! The header `include/congest.h` is generated from this file at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use congest_core::pressure::{eval_h_delta, eval_h_eps, eval_pi_delta, eval_pi_eps, PressureParams};
use congest_core::run::{run_to_dir, Simulation};
use congest_core::scenario::{parse_scenario, preset, serialize_scenario, ScenarioSpec};
use congest_core::validate::{validate_problem_data, Admissibility};
use congest_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongestStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidString = 2,
    /// The caller's buffer is too small; the required size was reported.
    BufferTooSmall = 3,
    /// Parameters, grid or continuation plan rejected.
    InvalidParams = 10,
    /// Malformed configuration text.
    Parse = 11,
    /// The problem data violate a hypothesis of the model.
    Hypothesis = 12,
    /// A pressure-law argument lies outside its domain.
    Domain = 13,
    /// The time stepper aborted.
    Solver = 20,
    /// A file could not be read or written.
    Io = 30,
    /// An internal panic was caught.
    Panic = 99,
}

impl From<&Error> for CongestStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Plan(_) | Error::GridMismatch(_) => CongestStatus::InvalidParams,
            Error::Parse { .. } => CongestStatus::Parse,
            Error::Hypothesis { .. } => CongestStatus::Hypothesis,
            Error::Domain(_) => CongestStatus::Domain,
            Error::Io { .. } => CongestStatus::Io,
            _ => CongestStatus::Solver,
        }
    }
}

/// Which admissibility alternative of the stiff limit holds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongestAdmissibility {
    PositiveFlux = 0,
    Smallness = 1,
    NoGuarantee = 2,
}

/// Cell fields that can be copied out of a simulation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongestField {
    Rho = 0,
    Z = 1,
    Rhostar = 2,
    /// Truncated pressure of `Z`.
    Pressure = 3,
}

/// Constants of the singular pressure law. `delta = 0` selects the
/// untruncated law.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CongestPressureParams {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl From<CongestPressureParams> for PressureParams {
    fn from(p: CongestPressureParams) -> Self {
        PressureParams {
            epsilon: p.epsilon,
            delta: p.delta,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
        }
    }
}

/// Run-wide diagnostics accumulated so far.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CongestSummary {
    pub time: f64,
    pub steps: usize,
    pub max_z: f64,
    pub energy_residual_positive: f64,
    pub max_rho_closure: f64,
    pub max_z_closure: f64,
    pub max_recovery: f64,
    pub pi_one_minus_z_time: f64,
}

/// Opaque scenario description.
pub struct CongestScenario {
    spec: ScenarioSpec,
}

/// Opaque running simulation.
pub struct CongestSimulation {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(CongestStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CongestStatus::from(&e), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> CongestStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CongestStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            CongestStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CongestStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CongestStatus::InvalidString, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn congest_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn congest_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_scenario(out: *mut *mut CongestScenario, spec: ScenarioSpec) -> Outcome {
    let out = unsafe { mut_arg(out, "out")? };
    *out = Box::into_raw(Box::new(CongestScenario { spec }));
    Ok(())
}

/// Creates a scenario from a built-in preset name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_preset(name: *const c_char, out: *mut *mut CongestScenario) -> CongestStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        new_scenario(out, preset(name)?)
    })
}

/// Parses a scenario from configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_parse(text: *const c_char, out: *mut *mut CongestScenario) -> CongestStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        new_scenario(out, parse_scenario(text)?)
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_free(scenario: *mut CongestScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Replaces the stiffness `epsilon` and truncation width `delta`.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_set_epsilon(
    scenario: *mut CongestScenario,
    epsilon: f64,
    delta: f64,
) -> CongestStatus {
    guard(|| {
        let s = mut_arg(scenario, "scenario")?;
        let params = s.spec.pressure.with_eps_delta(epsilon, delta);
        params.validate(s.spec.grid.dim)?;
        s.spec.pressure = params;
        Ok(())
    })
}

/// Replaces the cell count along x (the aspect ratio is kept in 2D).
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_set_cells(scenario: *mut CongestScenario, nx: usize) -> CongestStatus {
    guard(|| {
        let s = mut_arg(scenario, "scenario")?;
        let spec = s.spec.clone().with_cells(nx);
        spec.grid.build()?;
        s.spec = spec;
        Ok(())
    })
}

/// Replaces the final time.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_set_horizon(scenario: *mut CongestScenario, horizon: f64) -> CongestStatus {
    guard(|| {
        let s = mut_arg(scenario, "scenario")?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Failure(CongestStatus::InvalidParams, format!("horizon must be positive, got {horizon}")));
        }
        s.spec.time.horizon = horizon;
        Ok(())
    })
}

/// Checks every data hypothesis. Returns `CONGEST_STATUS_HYPOTHESIS` (or
/// `CONGEST_STATUS_INVALID_PARAMS`) naming the first violation; on success
/// writes which stiff-limit alternative holds to `admissibility` if it is
/// not null.
///
/// # Safety
/// `scenario` must be a live handle; `admissibility` may be null.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_validate(
    scenario: *const CongestScenario,
    admissibility: *mut CongestAdmissibility,
) -> CongestStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let report = validate_problem_data(&s.spec).into_result()?;
        if let Some(out) = admissibility.as_mut() {
            *out = match report.admissibility {
                Admissibility::PositiveFlux => CongestAdmissibility::PositiveFlux,
                Admissibility::Smallness => CongestAdmissibility::Smallness,
                Admissibility::NoGuarantee => CongestAdmissibility::NoGuarantee,
            };
        }
        Ok(())
    })
}

/// Writes the scenario in configuration syntax, NUL-terminated, into `buf`.
/// `needed` receives the required size including the terminator; when it
/// exceeds `capacity` nothing is written and `CONGEST_STATUS_BUFFER_TOO_SMALL`
/// is returned. `buf` may be null when `capacity` is 0.
///
/// # Safety
/// `buf` must be writable for `capacity` bytes and `needed` valid.
#[no_mangle]
pub unsafe extern "C" fn congest_scenario_to_config(
    scenario: *const CongestScenario,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> CongestStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let needed = mut_arg(needed, "needed")?;
        let text = serialize_scenario(&s.spec);
        *needed = text.len() + 1;
        if *needed > capacity {
            return Err(Failure(
                CongestStatus::BufferTooSmall,
                format!("config needs {} bytes, buffer has {capacity}", *needed),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Runs a scenario to its horizon, writing all outputs into `dir`.
///
/// # Safety
/// `scenario` must be a live handle and `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn congest_run_to_dir(scenario: *const CongestScenario, dir: *const c_char) -> CongestStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let dir = str_arg(dir, "dir")?;
        run_to_dir(&s.spec, Path::new(dir))?;
        Ok(())
    })
}

/// Validates the scenario and creates a simulation at `t = 0`. The scenario
/// handle remains owned by the caller.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_new(
    scenario: *const CongestScenario,
    out: *mut *mut CongestSimulation,
) -> CongestStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let out = mut_arg(out, "out")?;
        let sim = Simulation::new(&s.spec)?;
        *out = Box::into_raw(Box::new(CongestSimulation { sim }));
        Ok(())
    })
}

/// Releases a simulation. Null is ignored.
///
/// # Safety
/// `sim` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_free(sim: *mut CongestSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances to `t_stop`, capped at the horizon. After a solver failure the
/// simulation keeps the last accepted state.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_run_until(sim: *mut CongestSimulation, t_stop: f64) -> CongestStatus {
    guard(|| {
        let s = mut_arg(sim, "sim")?;
        s.sim.run_until(t_stop, |_| Ok(()))?;
        Ok(())
    })
}

/// Current simulation time, or NaN for a null handle.
///
/// # Safety
/// `sim` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_time(sim: *const CongestSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.sim.state.t)
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `sim` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_cell_count(sim: *const CongestSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.sim.problem.grid.n_cells())
}

/// Copies a cell field (row-major, x fastest) into `buf`, which must hold
/// at least `congest_simulation_cell_count` values.
///
/// # Safety
/// `sim` must be a live handle and `buf` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_copy_field(
    sim: *const CongestSimulation,
    field: CongestField,
    buf: *mut f64,
    len: usize,
) -> CongestStatus {
    guard(|| {
        let s = ref_arg(sim, "sim")?;
        let state = &s.sim.state;
        let n = state.z.len();
        if len < n {
            return Err(Failure(CongestStatus::BufferTooSmall, format!("field has {n} cells, buffer holds {len}")));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let out = std::slice::from_raw_parts_mut(buf, n);
        match field {
            CongestField::Rho => out.copy_from_slice(&state.rho),
            CongestField::Z => out.copy_from_slice(&state.z),
            CongestField::Rhostar => out.copy_from_slice(&state.rhostar),
            CongestField::Pressure => {
                let p = s.sim.problem.params();
                for (o, &z) in out.iter_mut().zip(&state.z) {
                    *o = congest_core::pressure::pi_delta_unchecked(z, p);
                }
            }
        }
        Ok(())
    })
}

/// Fills `out` with the diagnostics accumulated so far.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn congest_simulation_summary(
    sim: *const CongestSimulation,
    out: *mut CongestSummary,
) -> CongestStatus {
    guard(|| {
        let s = ref_arg(sim, "sim")?;
        let out = mut_arg(out, "out")?;
        let r = s.sim.summary();
        *out = CongestSummary {
            time: s.sim.state.t,
            steps: r.steps,
            max_z: r.max_z,
            energy_residual_positive: r.energy_residual_positive,
            max_rho_closure: r.max_rho_closure,
            max_z_closure: r.max_z_closure,
            max_recovery: r.max_recovery,
            pi_one_minus_z_time: r.pi_one_minus_z_time,
        };
        Ok(())
    })
}

fn pressure_eval(
    params: *const CongestPressureParams,
    out: *mut f64,
    f: impl FnOnce(&PressureParams) -> congest_core::Result<f64>,
) -> CongestStatus {
    guard(|| {
        let p: PressureParams = unsafe { *ref_arg(params, "params")? }.into();
        let out = unsafe { mut_arg(out, "out")? };
        p.validate(1)?;
        *out = f(&p)?;
        Ok(())
    })
}

/// Pressure at `z`: the truncated law when `params->delta > 0`, otherwise
/// the singular law (which requires `0 <= z < 1`).
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn congest_pressure(z: f64, params: *const CongestPressureParams, out: *mut f64) -> CongestStatus {
    pressure_eval(params, out, |p| if p.delta > 0.0 { eval_pi_delta(z, p) } else { eval_pi_eps(z, p) })
}

/// Energy potential `z ∫₀^z π(s)/s² ds` of the law selected as in
/// [`congest_pressure`].
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn congest_pressure_potential(
    z: f64,
    params: *const CongestPressureParams,
    out: *mut f64,
) -> CongestStatus {
    pressure_eval(params, out, |p| if p.delta > 0.0 { eval_h_delta(z, p) } else { eval_h_eps(z, p) })
}
