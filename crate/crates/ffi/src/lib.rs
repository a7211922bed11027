//! C ABI over the lambda-engine solvers.
//!
//! Parameters and solutions live behind opaque handles that the caller frees
//! with the matching `*_free` function. Every fallible call returns an
//! [`LeStatus`]; on failure [`le_last_error`] describes what went wrong on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lambda_engine::dynamics::{extract_harmonics, stroboscopic_steady_state, SteadyOptions};
use lambda_engine::floquet::{
    gain, harmonic_balance_solve, linear_response_gain, populations_closed_form,
};
use lambda_engine::{EngineParams, Error, FloquetComponents, Level, ModulationMode, ThermoFluxes};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SolverFailure = 3,
    Unsupported = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeLevel {
    G = 0,
    Gp = 1,
    E = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeModulation {
    FirstOrder = 0,
    Exact = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LePopulations {
    pub gg: f64,
    pub gpgp: f64,
    pub ee: f64,
}

/// Period-averaged energy fluxes with ħ = 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeFluxes {
    pub p_c: f64,
    pub qdot_c: f64,
    pub qdot_out: f64,
    pub qdot_h: f64,
    pub edot: f64,
    /// Meaningful only when `efficiency_defined` is true.
    pub efficiency: f64,
    pub efficiency_defined: bool,
}

/// Engine parameters. Create with `le_params_new`.
pub struct LeParams {
    inner: EngineParams,
}

/// A periodic steady state: harmonic amplitudes plus derived fluxes.
pub struct LeFloquet {
    params: EngineParams,
    components: FloquetComponents,
    fluxes: ThermoFluxes,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("interior NULs removed"));
}

fn status_of(e: &Error) -> LeStatus {
    match e {
        Error::InvalidParameter { .. } | Error::Domain(_) | Error::Config { .. } => {
            LeStatus::InvalidArgument
        }
        Error::Unsupported(_) => LeStatus::Unsupported,
        _ => LeStatus::SolverFailure,
    }
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), (LeStatus, String)>) -> LeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LeStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {what}"));
            LeStatus::Panic
        }
    }
}

fn solver(e: Error) -> (LeStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (LeStatus, String) {
    (LeStatus::NullPointer, format!("`{what}` is NULL"))
}

unsafe fn params_ref<'a>(p: *const LeParams) -> Result<&'a EngineParams, (LeStatus, String)> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null("params"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (LeStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn to_c(z: lambda_engine::Complex64) -> LeComplex {
    LeComplex { re: z.re, im: z.im }
}

fn to_fluxes(f: &ThermoFluxes) -> LeFluxes {
    LeFluxes {
        p_c: f.p_c,
        qdot_c: f.qdot_c,
        qdot_out: f.qdot_out,
        qdot_h: f.qdot_h,
        edot: f.edot_residual,
        efficiency: f.efficiency.unwrap_or(f64::NAN),
        efficiency_defined: f.efficiency.is_some(),
    }
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn le_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn le_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New parameter set with default values. Never NULL.
#[no_mangle]
pub extern "C" fn le_params_new() -> *mut LeParams {
    Box::into_raw(Box::new(LeParams {
        inner: EngineParams::default(),
    }))
}

/// # Safety
/// `params` must come from `le_params_new` and not have been freed. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn le_params_free(params: *mut LeParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Sets a parameter by name (`eta`, `n_h`, `omega_rabi`, ...). The new value
/// is validated; on failure the parameters are left unchanged.
///
/// # Safety
/// `params` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn le_params_set(
    params: *mut LeParams,
    name: *const c_char,
    value: f64,
) -> LeStatus {
    guard(|| {
        let p = params.as_mut().ok_or_else(|| null("params"))?;
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (LeStatus::InvalidArgument, "name is not UTF-8".to_owned()))?;
        let mut next = p.inner;
        if !next.set(name, value) {
            return Err((
                LeStatus::InvalidArgument,
                format!("unknown parameter `{name}`"),
            ));
        }
        next.validate().map_err(solver)?;
        p.inner = next;
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle, `name` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn le_params_get(
    params: *const LeParams,
    name: *const c_char,
    out: *mut f64,
) -> LeStatus {
    guard(|| {
        let p = params_ref(params)?;
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (LeStatus::InvalidArgument, "name is not UTF-8".to_owned()))?;
        let v = p.get(name).ok_or_else(|| {
            (
                LeStatus::InvalidArgument,
                format!("unknown parameter `{name}`"),
            )
        })?;
        write(out, v, "out")
    })
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_params_set_modulation(
    params: *mut LeParams,
    mode: LeModulation,
) -> LeStatus {
    guard(|| {
        let p = params.as_mut().ok_or_else(|| null("params"))?;
        p.inner.modulation = match mode {
            LeModulation::FirstOrder => ModulationMode::FirstOrder,
            LeModulation::Exact => ModulationMode::Exact,
        };
        Ok(())
    })
}

/// Closed-form gain on both sideband branches.
///
/// # Safety
/// `params` must be a live handle; `plus` and `minus` writable.
#[no_mangle]
pub unsafe extern "C" fn le_gain(
    params: *const LeParams,
    plus: *mut LeComplex,
    minus: *mut LeComplex,
) -> LeStatus {
    guard(|| {
        let g = gain(params_ref(params)?).map_err(solver)?;
        write(plus, to_c(g.plus), "plus")?;
        write(minus, to_c(g.minus), "minus")
    })
}

/// Closed-form steady-state populations.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_populations(
    params: *const LeParams,
    out: *mut LePopulations,
) -> LeStatus {
    guard(|| {
        let p = populations_closed_form(params_ref(params)?).map_err(solver)?;
        write(
            out,
            LePopulations {
                gg: p.gg,
                gpgp: p.gpgp,
                ee: p.ee,
            },
            "out",
        )
    })
}

/// Periodic steady state by harmonic balance at order `l_max`. On success
/// `*out` receives a handle to free with `le_floquet_free`.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_harmonic_balance(
    params: *const LeParams,
    l_max: usize,
    out: *mut *mut LeFloquet,
) -> LeStatus {
    guard(|| {
        let p = *params_ref(params)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let components = harmonic_balance_solve(&p, l_max).map_err(solver)?;
        let fluxes = ThermoFluxes::from_floquet(&components, &p).map_err(solver)?;
        out.write(Box::into_raw(Box::new(LeFloquet {
            params: p,
            components,
            fluxes,
        })));
        Ok(())
    })
}

/// Periodic steady state by time-domain integration to a stroboscopic fixed
/// point, reduced to harmonics up to `l_max`.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_time_domain(
    params: *const LeParams,
    tol: f64,
    l_max: usize,
    out: *mut *mut LeFloquet,
) -> LeStatus {
    guard(|| {
        let p = *params_ref(params)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ss = stroboscopic_steady_state(
            &p,
            &SteadyOptions {
                tol,
                ..Default::default()
            },
        )
        .map_err(solver)?;
        let h = extract_harmonics(&ss.orbit, l_max).map_err(solver)?;
        let fluxes = ThermoFluxes::from_orbit(&ss.orbit, &p).map_err(solver)?;
        out.write(Box::into_raw(Box::new(LeFloquet {
            params: p,
            components: h.components,
            fluxes,
        })));
        Ok(())
    })
}

/// # Safety
/// `fc` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn le_floquet_lmax(fc: *const LeFloquet) -> usize {
    fc.as_ref().map_or(0, |f| f.components.l_max())
}

/// Harmonic amplitude ρ_jk,l. Harmonics beyond the truncation are zero.
///
/// # Safety
/// `fc` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_floquet_get(
    fc: *const LeFloquet,
    j: LeLevel,
    k: LeLevel,
    l: i32,
    out: *mut LeComplex,
) -> LeStatus {
    guard(|| {
        let f = fc.as_ref().ok_or_else(|| null("fc"))?;
        let level = |x: LeLevel| match x {
            LeLevel::G => Level::G,
            LeLevel::Gp => Level::Gp,
            LeLevel::E => Level::E,
        };
        write(out, to_c(f.components.get(level(j), level(k), l)), "out")
    })
}

/// Linear-response probe gain of the steady state.
///
/// # Safety
/// `fc` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_floquet_gain(fc: *const LeFloquet, out: *mut LeComplex) -> LeStatus {
    guard(|| {
        let f = fc.as_ref().ok_or_else(|| null("fc"))?;
        let g = linear_response_gain(&f.components, &f.params).map_err(solver)?;
        write(out, to_c(g), "out")
    })
}

/// Period-averaged energy fluxes of the steady state.
///
/// # Safety
/// `fc` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_floquet_fluxes(fc: *const LeFloquet, out: *mut LeFluxes) -> LeStatus {
    guard(|| {
        let f = fc.as_ref().ok_or_else(|| null("fc"))?;
        write(out, to_fluxes(&f.fluxes), "out")
    })
}

/// # Safety
/// `fc` must come from a solver call and not have been freed. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn le_floquet_free(fc: *mut LeFloquet) {
    if !fc.is_null() {
        drop(Box::from_raw(fc));
    }
}
