//! C ABI for the logcave toolkit.
//!
//! Conventions:
//! - Every function returns an `LgcStatus`; results come back through out
//!   pointers. `LGC_STATUS_OK` is 0.
//! - Handles (`lgc_body`, `lgc_potential`, `lgc_trajectory`) are opaque;
//!   create them with the constructors here and release them with the
//!   matching `_free`. Freeing NULL is a no-op; nothing here takes
//!   ownership of caller buffers.
//! - On any non-OK status, `lgc_last_error_message()` returns a
//!   thread-local NUL-terminated description, valid until the next failing
//!   call on the same thread.
//! - Panics never cross the boundary; they are caught and surfaced as
//!   `LGC_STATUS_PANIC`.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use logcave::config::{parse_potential, resolve_body};
use logcave::geometry::ConvexBody;
use logcave::potential::Potential;
use logcave::sampler::{
    run_lmc, schedule_practical, schedule_theorem1, SamplerConfig, ScheduleCase, Trajectory,
};
use logcave::volume::{build_schedule_with, estimate_volume, SamplerKind};
use logcave::Error;

/// Status code carried by every API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LgcStatus {
    Ok = 0,
    /// Invalid argument or configuration.
    Invalid = 1,
    /// Iterative projection failed to converge.
    ProjectionDiverged = 2,
    /// Numeric failure (non-finite state, collapsed acceptance, ...).
    Numeric = 3,
    /// I/O failure.
    Io = 4,
    /// A required pointer argument was NULL.
    NullArgument = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

/// Opaque convex-body handle.
pub struct lgc_body {
    inner: ConvexBody,
}

/// Opaque potential handle.
pub struct lgc_potential {
    inner: Potential,
}

/// Opaque trajectory handle: the chain states plus boundary local-time
/// events produced by one sampling run.
pub struct lgc_trajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: Vec<u8> = msg.bytes().map(|b| if b == 0 { b' ' } else { b }).collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> LgcStatus {
    match err {
        Error::Invalid(_) => LgcStatus::Invalid,
        Error::ProjectionDiverged { .. } => LgcStatus::ProjectionDiverged,
        Error::Numeric(_) => LgcStatus::Numeric,
        Error::Io(_) => LgcStatus::Io,
    }
}

fn fail(err: &Error) -> LgcStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn null_arg(name: &str) -> LgcStatus {
    set_error(&format!("{name} must not be NULL"));
    LgcStatus::NullArgument
}

/// Run `f` with panics contained; any panic becomes `LGC_STATUS_PANIC`.
fn guarded(f: impl FnOnce() -> LgcStatus) -> LgcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic caught at the C boundary");
            LgcStatus::Panic
        }
    }
}

/// Last error message for this thread (empty string if none). The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lgc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, LgcStatus> {
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        LgcStatus::Invalid
    })
}

// ---------------------------------------------------------------------------
// bodies

/// Euclidean ball of the given radius in dimension `n`.
///
/// # Safety
/// `out` must be a valid pointer. The result must be released with
/// `lgc_body_free`.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_ball(
    n: usize,
    radius: f64,
    out: *mut *mut lgc_body,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| match ConvexBody::ball(n, radius) {
        Ok(b) => {
            *out = Box::into_raw(Box::new(lgc_body { inner: b }));
            LgcStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Axis-aligned box with the given per-coordinate bounds (`n` entries each).
///
/// # Safety
/// `lower`/`upper` must point to `n` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_box(
    n: usize,
    lower: *const f64,
    upper: *const f64,
    out: *mut *mut lgc_body,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if lower.is_null() || upper.is_null() {
        return null_arg("lower/upper");
    }
    let lo = std::slice::from_raw_parts(lower, n).to_vec();
    let hi = std::slice::from_raw_parts(upper, n).to_vec();
    guarded(|| match ConvexBody::axis_box(lo.clone(), hi.clone()) {
        Ok(b) => {
            *out = Box::into_raw(Box::new(lgc_body { inner: b }));
            LgcStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Resolve a body from an alias (`box{n}`, `ball{n}`, `boxball{n}`) or a
/// body-file path, exactly like the CLI `--body` flag.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_resolve(
    spec: *const c_char,
    out: *mut *mut lgc_body,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if spec.is_null() {
        return null_arg("spec");
    }
    let spec = match read_utf8(spec) {
        Ok(s) => s,
        Err(s) => return s,
    };
    guarded(|| match resolve_body(spec) {
        Ok((b, _label)) => {
            *out = Box::into_raw(Box::new(lgc_body { inner: b }));
            LgcStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// # Safety
/// `body` must be a live handle from this library, or NULL (no-op).
#[no_mangle]
pub unsafe extern "C" fn lgc_body_free(body: *mut lgc_body) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Ambient dimension, or 0 if `body` is NULL.
///
/// # Safety
/// `body` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_dim(body: *const lgc_body) -> usize {
    if body.is_null() {
        0
    } else {
        (*body).inner.dim()
    }
}

/// Writes 1 to `out` if `x` lies in the body, else 0.
///
/// # Safety
/// `x` must point to `len` doubles with `len` equal to the body dimension;
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_membership(
    body: *const lgc_body,
    x: *const f64,
    len: usize,
    out: *mut i32,
) -> LgcStatus {
    if body.is_null() {
        return null_arg("body");
    }
    if x.is_null() || out.is_null() {
        return null_arg("x/out");
    }
    let b = &(*body).inner;
    if len != b.dim() {
        set_error(&format!("point has length {len}, body dimension is {}", b.dim()));
        return LgcStatus::Invalid;
    }
    let point = std::slice::from_raw_parts(x, len);
    guarded(|| {
        *out = i32::from(b.membership(point));
        LgcStatus::Ok
    })
}

/// Euclidean projection of `x` onto the body, written in place.
///
/// # Safety
/// `x` must point to `len` writable doubles with `len` equal to the body
/// dimension.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_project(
    body: *const lgc_body,
    x: *mut f64,
    len: usize,
) -> LgcStatus {
    if body.is_null() {
        return null_arg("body");
    }
    if x.is_null() {
        return null_arg("x");
    }
    let b = &(*body).inner;
    if len != b.dim() {
        set_error(&format!("point has length {len}, body dimension is {}", b.dim()));
        return LgcStatus::Invalid;
    }
    let point = std::slice::from_raw_parts_mut(x, len);
    guarded(|| match b.project(point) {
        Ok(p) => {
            point.copy_from_slice(&p);
            LgcStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Minkowski gauge of `x` with respect to the body.
///
/// # Safety
/// `x` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lgc_body_gauge(
    body: *const lgc_body,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> LgcStatus {
    if body.is_null() {
        return null_arg("body");
    }
    if x.is_null() || out.is_null() {
        return null_arg("x/out");
    }
    let b = &(*body).inner;
    if len != b.dim() {
        set_error(&format!("point has length {len}, body dimension is {}", b.dim()));
        return LgcStatus::Invalid;
    }
    let point = std::slice::from_raw_parts(x, len);
    guarded(|| {
        *out = b.gauge(point);
        LgcStatus::Ok
    })
}

// ---------------------------------------------------------------------------
// potentials

/// Uniform (zero) potential.
///
/// # Safety
/// `out` must be valid; release the result with `lgc_potential_free`.
#[no_mangle]
pub unsafe extern "C" fn lgc_potential_uniform(out: *mut *mut lgc_potential) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        *out = Box::into_raw(Box::new(lgc_potential { inner: Potential::uniform() }));
        LgcStatus::Ok
    })
}

/// Potential from a CLI-style spec (`uniform`, `gaussian`,
/// `gaussian:<sigma>`) relative to the given body.
///
/// # Safety
/// `spec` must be NUL-terminated; `body` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lgc_potential_parse(
    spec: *const c_char,
    body: *const lgc_body,
    out: *mut *mut lgc_potential,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if spec.is_null() || body.is_null() {
        return null_arg("spec/body");
    }
    let spec = match read_utf8(spec) {
        Ok(s) => s,
        Err(s) => return s,
    };
    guarded(|| match parse_potential(spec, &(*body).inner) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(lgc_potential { inner: p }));
            LgcStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// # Safety
/// `potential` must be a live handle from this library, or NULL (no-op).
#[no_mangle]
pub unsafe extern "C" fn lgc_potential_free(potential: *mut lgc_potential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}

// ---------------------------------------------------------------------------
// sampling

/// Run the projected Langevin chain for `steps` steps at step size `eta`
/// from the body's center, returning a trajectory handle.
///
/// # Safety
/// `body`/`potential` must be live handles; `out` valid. Release the result
/// with `lgc_trajectory_free`.
#[no_mangle]
pub unsafe extern "C" fn lgc_run_lmc(
    body: *const lgc_body,
    potential: *const lgc_potential,
    eta: f64,
    steps: usize,
    seed: u64,
    out: *mut *mut lgc_trajectory,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if body.is_null() || potential.is_null() {
        return null_arg("body/potential");
    }
    guarded(|| {
        match run_lmc(&(*body).inner, &(*potential).inner, &SamplerConfig::new(eta, steps, seed)) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(lgc_trajectory { inner: t }));
                LgcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of stored states (steps + 1), or 0 for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lgc_trajectory_states(traj: *const lgc_trajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (*traj).inner.states.len()
    }
}

/// Ambient dimension of the stored states, or 0 for NULL/empty.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lgc_trajectory_dim(traj: *const lgc_trajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (*traj).inner.states.first().map_or(0, Vec::len)
    }
}

/// Copy state `k` into `buf` (`len` must equal the trajectory dimension).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lgc_trajectory_state(
    traj: *const lgc_trajectory,
    k: usize,
    buf: *mut f64,
    len: usize,
) -> LgcStatus {
    if traj.is_null() {
        return null_arg("traj");
    }
    if buf.is_null() {
        return null_arg("buf");
    }
    let t = &(*traj).inner;
    let Some(state) = t.states.get(k) else {
        set_error(&format!("state index {k} out of range ({} states)", t.states.len()));
        return LgcStatus::Invalid;
    };
    if len != state.len() {
        set_error(&format!("buffer length {len}, state dimension {}", state.len()));
        return LgcStatus::Invalid;
    }
    std::slice::from_raw_parts_mut(buf, len).copy_from_slice(state);
    LgcStatus::Ok
}

/// Number of boundary local-time events, or 0 for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lgc_trajectory_events(traj: *const lgc_trajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (*traj).inner.local_time.len()
    }
}

/// Read event `i`: producing step index, time, mass, and the outer unit
/// normal (`normal_len` must equal the trajectory dimension). Any out
/// pointer may be NULL to skip that field; `normal` NULL skips the normal.
///
/// # Safety
/// Non-NULL out pointers must be valid; `normal` must hold `normal_len`
/// writable doubles when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn lgc_trajectory_event(
    traj: *const lgc_trajectory,
    i: usize,
    step_index: *mut usize,
    time: *mut f64,
    mass: *mut f64,
    normal: *mut f64,
    normal_len: usize,
) -> LgcStatus {
    if traj.is_null() {
        return null_arg("traj");
    }
    let t = &(*traj).inner;
    let Some(event) = t.local_time.get(i) else {
        set_error(&format!("event index {i} out of range ({} events)", t.local_time.len()));
        return LgcStatus::Invalid;
    };
    if !step_index.is_null() {
        *step_index = event.step_index;
    }
    if !time.is_null() {
        *time = event.time;
    }
    if !mass.is_null() {
        *mass = event.mass;
    }
    if !normal.is_null() {
        if normal_len != event.normal.len() {
            set_error(&format!(
                "normal buffer length {normal_len}, event dimension {}",
                event.normal.len()
            ));
            return LgcStatus::Invalid;
        }
        std::slice::from_raw_parts_mut(normal, normal_len).copy_from_slice(&event.normal);
    }
    LgcStatus::Ok
}

/// # Safety
/// `traj` must be a live handle from this library, or NULL (no-op).
#[no_mangle]
pub unsafe extern "C" fn lgc_trajectory_free(traj: *mut lgc_trajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

// ---------------------------------------------------------------------------
// volume and schedules

/// Gaussian-cooling volume estimate. `use_hit_and_run` 0 drives the phases
/// with projected Langevin, nonzero with hit-and-run.
///
/// # Safety
/// `body` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lgc_volume(
    body: *const lgc_body,
    samples_per_phase: usize,
    use_hit_and_run: i32,
    seed: u64,
    out: *mut f64,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if body.is_null() {
        return null_arg("body");
    }
    guarded(|| {
        let kind = if use_hit_and_run != 0 { SamplerKind::HitAndRun } else { SamplerKind::Lmc };
        let schedule = build_schedule_with(&(*body).inner, samples_per_phase, kind);
        match estimate_volume(&(*body).inner, &schedule, seed) {
            Ok(est) => {
                *out = est.value;
                LgcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Theoretical step-size schedule. `uniform_case` nonzero selects the
/// uniform-target rates, zero the general log-concave rates (which consume
/// `lipschitz_l` and `smooth_beta`). Writes the step size and step count.
///
/// # Safety
/// `out_eta`/`out_steps` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lgc_schedule_theorem(
    n: usize,
    circumradius: f64,
    epsilon: f64,
    uniform_case: i32,
    lipschitz_l: f64,
    smooth_beta: f64,
    out_eta: *mut f64,
    out_steps: *mut f64,
) -> LgcStatus {
    if out_eta.is_null() || out_steps.is_null() {
        return null_arg("out_eta/out_steps");
    }
    let case = if uniform_case != 0 { ScheduleCase::Uniform } else { ScheduleCase::General };
    guarded(|| match schedule_theorem1(n, circumradius, epsilon, case, lipschitz_l, smooth_beta) {
        Ok((eta, steps)) => {
            *out_eta = eta;
            *out_steps = steps;
            LgcStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// The practical step rule eta = 1/(beta n^2); beta <= 0 falls back to a
/// unit-scale Gaussian (beta = 1).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lgc_schedule_practical(
    beta: f64,
    n: usize,
    out: *mut f64,
) -> LgcStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        *out = schedule_practical(beta.max(0.0), n, 1.0);
        LgcStatus::Ok
    })
}
