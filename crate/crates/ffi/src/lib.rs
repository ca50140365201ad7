//! C ABI over chargeflow: equilibrium certificates and rational-ω simulations
//! behind opaque handles.
//!
//! Every fallible call returns a [`CfStatus`]; on failure the message is kept
//! per thread and can be read with [`cf_last_error`]. Handles are released
//! with their `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chargeflow::cli::build;
use chargeflow::dynamics::{integrate, FlowSpec, IntegrateOptions, OutputGrid, Trajectory};
use chargeflow::equilibria::{hermite_pair, EquilibriumCertificate, Recipe};
use chargeflow::scalar::rat;
use chargeflow::Error;
use num_complex::Complex64;

/// Status codes. Nonzero values match the CLI exit codes where both exist.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    Io = 1,
    Collision = 2,
    InvalidInput = 3,
    NonConvergence = 4,
    CertificationFailed = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    OutOfRange = 8,
    Panic = 9,
}

impl From<&Error> for CfStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            1 => CfStatus::Io,
            2 => CfStatus::Collision,
            4 => CfStatus::NonConvergence,
            5 => CfStatus::CertificationFailed,
            _ => CfStatus::InvalidInput,
        }
    }
}

/// Opaque certified equilibrium pair.
pub struct CfCertificate(EquilibriumCertificate);

/// Opaque sampled trajectory.
pub struct CfTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn guard(f: impl FnOnce() -> Result<(), (CfStatus, String)>) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CfStatus::Panic
        }
    }
}

fn lift(e: Error) -> (CfStatus, String) {
    (CfStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (CfStatus, String) {
    (CfStatus::NullPointer, format!("{what} is null"))
}

/// Copy `s` plus a terminating NUL into `buf`. `needed` (if non-null)
/// receives the full size including the NUL.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (CfStatus, String)> {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || len < n {
        return Err((CfStatus::BufferTooSmall, format!("buffer needs {n} bytes")));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf`.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null; `needed` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn cf_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> CfStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&msg, buf, len, needed) {
        Ok(()) => CfStatus::Ok,
        Err((s, _)) => s,
    }
}

/// Hermite Wronskian pair for strictly increasing `indices` and b = b_num / b_den.
///
/// # Safety
/// `indices` must point to `count` values; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_hermite(
    indices: *const usize,
    count: usize,
    b_num: i64,
    b_den: i64,
    out: *mut *mut CfCertificate,
) -> CfStatus {
    guard(|| {
        if out.is_null() || (indices.is_null() && count > 0) {
            return Err(null("argument"));
        }
        if b_den == 0 {
            return Err((CfStatus::InvalidInput, "b denominator is zero".into()));
        }
        let idx = if count == 0 { &[][..] } else { std::slice::from_raw_parts(indices, count) };
        let cert = hermite_pair(idx, &rat(b_num, b_den)).map_err(lift)?;
        *out = Box::into_raw(Box::new(CfCertificate(cert)));
        Ok(())
    })
}

/// Build and certify the pair described by a recipe JSON object, e.g.
/// `{"kind":"adler_moser","k":2,"ts":["0","1/2","0"]}`.
///
/// # Safety
/// `recipe_json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_from_recipe(recipe_json: *const c_char, out: *mut *mut CfCertificate) -> CfStatus {
    guard(|| {
        if recipe_json.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let text = CStr::from_ptr(recipe_json)
            .to_str()
            .map_err(|e| (CfStatus::InvalidInput, e.to_string()))?;
        let recipe: Recipe = serde_json::from_str(text).map_err(|e| (CfStatus::InvalidInput, e.to_string()))?;
        let cert = build(&recipe).map_err(lift)?;
        *out = Box::into_raw(Box::new(CfCertificate(cert)));
        Ok(())
    })
}

/// Load a certificate document and re-certify it.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_from_json(json: *const c_char, out: *mut *mut CfCertificate) -> CfStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (CfStatus::InvalidInput, e.to_string()))?;
        let cert = EquilibriumCertificate::from_json(text).map_err(lift)?;
        let cert = chargeflow::equilibria::certify_recipe(&cert).map_err(lift)?;
        *out = Box::into_raw(Box::new(CfCertificate(cert)));
        Ok(())
    })
}

/// Serialize to JSON. Call with a null buffer to learn the size.
///
/// # Safety
/// `cert` must come from this library; `buf` valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_to_json(
    cert: *const CfCertificate,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> CfStatus {
    guard(|| {
        let cert = cert.as_ref().ok_or_else(|| null("cert"))?;
        let json = cert.0.to_json().map_err(lift)?;
        copy_out(&json, buf, len, needed)
    })
}

/// Degrees of (p, q).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_degrees(cert: *const CfCertificate, p: *mut usize, q: *mut usize) -> CfStatus {
    guard(|| {
        let cert = cert.as_ref().ok_or_else(|| null("cert"))?;
        if p.is_null() || q.is_null() {
            return Err(null("output"));
        }
        (*p, *q) = cert.0.degrees;
        Ok(())
    })
}

/// 1 if the residual vanished identically in exact arithmetic, else 0.
///
/// # Safety
/// `cert` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_is_exact(cert: *const CfCertificate) -> i32 {
    cert.as_ref().map_or(0, |c| i32::from(c.0.is_exact_zero()))
}

/// Number of distinct charge sites.
///
/// # Safety
/// `cert` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_site_count(cert: *const CfCertificate) -> usize {
    cert.as_ref().map_or(0, |c| c.0.inventory().len())
}

/// Position and integer charge of site `index`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_site(
    cert: *const CfCertificate,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    charge: *mut i64,
) -> CfStatus {
    guard(|| {
        let cert = cert.as_ref().ok_or_else(|| null("cert"))?;
        if re.is_null() || im.is_null() || charge.is_null() {
            return Err(null("output"));
        }
        let site = cert
            .0
            .inventory()
            .get(index)
            .ok_or_else(|| (CfStatus::OutOfRange, format!("site {index} out of range")))?;
        *re = site.position.re;
        *im = site.position.im;
        *charge = site.charge;
        Ok(())
    })
}

/// # Safety
/// `cert` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_certificate_free(cert: *mut CfCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Integrate the rational-ω flow of `n` charges +1 and `m` charges −Λ from
/// the given positions (x's first) up to `t_end`, sampled at `samples + 1`
/// uniform times.
///
/// # Safety
/// `re` and `im` must each point to `n + m` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_simulate_rational_omega(
    omega: f64,
    capital_lambda: f64,
    n: usize,
    m: usize,
    re: *const f64,
    im: *const f64,
    t_end: f64,
    rtol: f64,
    atol: f64,
    samples: usize,
    out: *mut *mut CfTrajectory,
) -> CfStatus {
    guard(|| {
        let total = n + m;
        if out.is_null() || (total > 0 && (re.is_null() || im.is_null())) {
            return Err(null("argument"));
        }
        if !(t_end.is_finite() && t_end > 0.0 && rtol > 0.0 && atol > 0.0) || samples == 0 {
            return Err((CfStatus::InvalidInput, "t_end, tolerances and samples must be positive".into()));
        }
        let (re, im) = if total == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(re, total), std::slice::from_raw_parts(im, total))
        };
        let z: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let flow = FlowSpec::rational_omega(omega, capital_lambda, n, m);
        let init = flow.configuration(&z, 0.0);
        let opts = IntegrateOptions::with_tolerances(rtol, atol).with_grid(OutputGrid::Uniform(samples));
        let traj = integrate(&flow, &init, t_end, &opts).map_err(lift)?;
        *out = Box::into_raw(Box::new(CfTrajectory(traj)));
        Ok(())
    })
}

/// Number of stored samples.
///
/// # Safety
/// `traj` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cf_trajectory_len(traj: *const CfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Number of particles per sample.
///
/// # Safety
/// `traj` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cf_trajectory_particles(traj: *const CfTrajectory) -> usize {
    traj.as_ref()
        .and_then(|t| t.0.states.first())
        .map_or(0, |s| s.positions().len())
}

/// Time and position of one particle at one sample.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_trajectory_sample(
    traj: *const CfTrajectory,
    sample: usize,
    particle: usize,
    t: *mut f64,
    re: *mut f64,
    im: *mut f64,
) -> CfStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        if t.is_null() || re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let range = || (CfStatus::OutOfRange, format!("sample {sample} particle {particle} out of range"));
        let state = traj.0.states.get(sample).ok_or_else(range)?;
        let z = *state.positions().get(particle).ok_or_else(range)?;
        *t = traj.0.times[sample];
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// # Safety
/// `traj` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_trajectory_free(traj: *mut CfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
