//! C ABI for the gabm epidemic simulator.
//!
//! Conventions:
//! - A simulation is an opaque `GabmSim` handle created by one of the
//!   `gabm_sim_from_*` constructors and released with `gabm_sim_free`.
//! - Every fallible call returns a `GabmStatus`; on failure,
//!   `gabm_last_error` yields a malloc'd description for the calling thread
//!   (release it with `gabm_string_free`).
//! - All strings crossing the boundary are NUL-terminated UTF-8. Strings
//!   returned by this library are owned by the caller and must be released
//!   with `gabm_string_free`.
//!
//! The generated header lives at `include/gabm.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::sync::Arc;

use gabm::analytics::summarize_metrics;
use gabm::decision::BackendKind;
use gabm::error::Error;
use gabm::experiments::preset;
use gabm::world::{load_checkpoint, save_checkpoint, DayOutcome, Simulation, WorldConfig};

/// Result codes; nonzero mirrors the CLI exit-code contract.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GabmStatus {
    Ok = 0,
    ErrConfig = 2,
    ErrBackend = 3,
    ErrIo = 4,
    ErrNullArg = 5,
    ErrUtf8 = 6,
}

/// Opaque simulation handle.
pub struct GabmSim {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg.into()));
}

fn status_of(e: &Error) -> GabmStatus {
    match e {
        Error::Config(_) | Error::Analytics(_) => GabmStatus::ErrConfig,
        Error::Backend(gabm::error::BackendError::Config(_)) => GabmStatus::ErrConfig,
        Error::Backend(_) => GabmStatus::ErrBackend,
        Error::Checkpoint(_) | Error::Io(_) => GabmStatus::ErrIo,
    }
}

fn fail(e: Error) -> GabmStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, GabmStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(GabmStatus::ErrNullArg);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        GabmStatus::ErrUtf8
    })
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s)
        .map_or(std::ptr::null_mut(), CString::into_raw)
}

fn build_backend(kind: &str) -> Result<Arc<dyn gabm::decision::DecisionBackend>, Error> {
    kind.parse::<BackendKind>()?.build(None, None)
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn gabm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Description of the last error on this thread, or NULL if none.
/// The caller owns the returned string (free with `gabm_string_free`).
#[no_mangle]
pub extern "C" fn gabm_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => export_string(msg.clone()),
        None => std::ptr::null_mut(),
    })
}

/// Create a simulation from a named preset (see the CLI's `presets`
/// command), overriding its seed. `backend` is one of "oracle",
/// "always-out", "always-home", "llm".
///
/// # Safety
/// `preset_name` and `backend` must be valid NUL-terminated strings;
/// `out_sim` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_from_preset(
    preset_name: *const c_char,
    backend: *const c_char,
    seed: u64,
    out_sim: *mut *mut GabmSim,
) -> GabmStatus {
    if out_sim.is_null() {
        set_error("out_sim is null");
        return GabmStatus::ErrNullArg;
    }
    let name = match read_str(preset_name) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let backend_name = match read_str(backend) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config = match preset(name) {
        Ok(experiment) => WorldConfig {
            seed,
            ..experiment.world
        },
        Err(e) => return fail(e),
    };
    finish_construction(config, backend_name, out_sim)
}

/// Create a simulation from a world-configuration JSON document with fields
/// initial_healthy, initial_infected, contact_rate, infection_rate,
/// step_count, condition ("base" | "self_health" | "full"), seed, run_name.
///
/// # Safety
/// `config_json` and `backend` must be valid NUL-terminated strings;
/// `out_sim` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_from_config_json(
    config_json: *const c_char,
    backend: *const c_char,
    out_sim: *mut *mut GabmSim,
) -> GabmStatus {
    if out_sim.is_null() {
        set_error("out_sim is null");
        return GabmStatus::ErrNullArg;
    }
    let json = match read_str(config_json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let backend_name = match read_str(backend) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config: WorldConfig = match serde_json::from_str(json) {
        Ok(c) => c,
        Err(e) => return fail(Error::Config(format!("world config JSON: {e}"))),
    };
    finish_construction(config, backend_name, out_sim)
}

unsafe fn finish_construction(
    config: WorldConfig,
    backend_name: &str,
    out_sim: *mut *mut GabmSim,
) -> GabmStatus {
    let backend = match build_backend(backend_name) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    match Simulation::new(config, backend) {
        Ok(sim) => {
            *out_sim = Box::into_raw(Box::new(GabmSim { sim }));
            GabmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Load a checkpoint file and attach a backend to it.
///
/// # Safety
/// `path` and `backend` must be valid NUL-terminated strings; `out_sim`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_load_checkpoint(
    path: *const c_char,
    backend: *const c_char,
    out_sim: *mut *mut GabmSim,
) -> GabmStatus {
    if out_sim.is_null() {
        set_error("out_sim is null");
        return GabmStatus::ErrNullArg;
    }
    let path = match read_str(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let backend_name = match read_str(backend) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let world = match load_checkpoint(Path::new(path)) {
        Ok(w) => w,
        Err(e) => return fail(Error::Checkpoint(e)),
    };
    let backend = match build_backend(backend_name) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    *out_sim = Box::into_raw(Box::new(GabmSim {
        sim: Simulation::from_world(world, backend),
    }));
    GabmStatus::Ok
}

/// Advance one day. `out_finished` (optional) is set to true when the run
/// has reached its horizon or stopped early; stepping a finished simulation
/// is a no-op that reports finished.
///
/// # Safety
/// `sim` must be a live handle from this library; `out_finished` must be
/// NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_step(sim: *mut GabmSim, out_finished: *mut bool) -> GabmStatus {
    let Some(handle) = sim.as_mut() else {
        set_error("sim is null");
        return GabmStatus::ErrNullArg;
    };
    match handle.sim.step_day() {
        Ok(DayOutcome::Completed(_)) => {
            if !out_finished.is_null() {
                *out_finished = handle.sim.finished();
            }
            GabmStatus::Ok
        }
        Ok(DayOutcome::Finished) => {
            if !out_finished.is_null() {
                *out_finished = true;
            }
            GabmStatus::Ok
        }
        Err(e) => fail(Error::Backend(e)),
    }
}

/// Run to the horizon or early stop.
///
/// # Safety
/// `sim` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_run(sim: *mut GabmSim) -> GabmStatus {
    let Some(handle) = sim.as_mut() else {
        set_error("sim is null");
        return GabmStatus::ErrNullArg;
    };
    match handle.sim.run() {
        Ok(()) => GabmStatus::Ok,
        Err(e) => fail(Error::Backend(e)),
    }
}

/// Number of completed days, or -1 for a null handle.
///
/// # Safety
/// `sim` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_day(sim: *const GabmSim) -> i32 {
    match sim.as_ref() {
        Some(handle) => handle.sim.world().day as i32,
        None => -1,
    }
}

/// Per-day metrics as a JSON array (fields: day, new_cases, mobility_count,
/// infected, susceptible, recovered, total_contacts).
///
/// # Safety
/// `sim` must be a live handle; `out_json` must be valid. The returned
/// string is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_metrics_json(
    sim: *const GabmSim,
    out_json: *mut *mut c_char,
) -> GabmStatus {
    let Some(handle) = sim.as_ref() else {
        set_error("sim is null");
        return GabmStatus::ErrNullArg;
    };
    if out_json.is_null() {
        set_error("out_json is null");
        return GabmStatus::ErrNullArg;
    }
    match serde_json::to_string(&handle.sim.world().metrics) {
        Ok(body) => {
            *out_json = export_string(body);
            GabmStatus::Ok
        }
        Err(e) => fail(Error::Analytics(e.to_string())),
    }
}

/// Run summary as a JSON object: population, days_run, early_stopped,
/// cumulative_cases, average_mobility, largest_peak, epidemic_duration,
/// duration_censored.
///
/// # Safety
/// `sim` must be a live handle; `out_json` must be valid. The returned
/// string is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_summary_json(
    sim: *const GabmSim,
    out_json: *mut *mut c_char,
) -> GabmStatus {
    let Some(handle) = sim.as_ref() else {
        set_error("sim is null");
        return GabmStatus::ErrNullArg;
    };
    if out_json.is_null() {
        set_error("out_json is null");
        return GabmStatus::ErrNullArg;
    }
    let world = handle.sim.world();
    let summary = summarize_metrics(&world.metrics, world.population());
    let doc = serde_json::json!({
        "population": world.population(),
        "days_run": world.day,
        "early_stopped": handle.sim.early_stopped(),
        "cumulative_cases": summary.cumulative_cases,
        "average_mobility": summary.average_mobility,
        "largest_peak": summary.largest_peak,
        "epidemic_duration": summary.epidemic_duration,
        "duration_censored": summary.duration_censored,
    });
    *out_json = export_string(doc.to_string());
    GabmStatus::Ok
}

/// Save the current world to a checkpoint file.
///
/// # Safety
/// `sim` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_save_checkpoint(
    sim: *const GabmSim,
    path: *const c_char,
) -> GabmStatus {
    let Some(handle) = sim.as_ref() else {
        set_error("sim is null");
        return GabmStatus::ErrNullArg;
    };
    let path = match read_str(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match save_checkpoint(handle.sim.world(), Path::new(path)) {
        Ok(()) => GabmStatus::Ok,
        Err(e) => fail(Error::Checkpoint(e)),
    }
}

/// Release a simulation handle. NULL is allowed.
///
/// # Safety
/// `sim` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gabm_sim_free(sim: *mut GabmSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Release a string returned by this library. NULL is allowed.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gabm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
