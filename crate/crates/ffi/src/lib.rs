//! C ABI for `homfam`.
//!
//! A family is an opaque `HomfamFamily` handle. Natural parameters are flat
//! `double` arrays of length `homfam_family_natural_len` (the `φ` part
//! followed by the character exponents); points are flat arrays of chart
//! coordinates, `homfam_family_chart_len` values per point. Every function
//! returns a `HomfamStatus`; on failure the message is available from
//! `homfam_last_error` on the same thread.

use homfam::families::fit::fit_mle;
use homfam::families::sample::sample;
use homfam::families::schema::ParameterDocument;
use homfam::{Error, FamilySpec, FamilyTag, NaturalParameter, Point};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes. The numeric values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomfamStatus {
    Ok = 0,
    /// Unknown family, unsupported variant or malformed document.
    Usage = 2,
    /// Parameter outside the natural domain, invalid point or degenerate data.
    Domain = 3,
    /// Integration or convergence failure.
    Numeric = 4,
    /// A required pointer argument was null or a buffer length was wrong.
    InvalidArgument = 5,
    /// Internal panic; the handle should not be reused.
    Panic = 6,
}

/// Opaque family handle.
pub struct HomfamFamily {
    spec: FamilySpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HomfamStatus {
    match e.exit_code() {
        2 => HomfamStatus::Usage,
        3 => HomfamStatus::Domain,
        _ => HomfamStatus::Numeric,
    }
}

struct Fail(HomfamStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: &str) -> Fail {
    Fail(HomfamStatus::InvalidArgument, msg.to_string())
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> HomfamStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HomfamStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HomfamStatus::Panic
        }
    }
}

unsafe fn handle<'a>(f: *const HomfamFamily) -> Result<&'a FamilySpec, Fail> {
    f.as_ref().map(|h| &h.spec).ok_or_else(|| invalid("family handle is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(HomfamStatus::Usage, format!("{what} is not valid UTF-8")))
}

fn theta_of(spec: &FamilySpec, values: &[f64]) -> Result<NaturalParameter, Fail> {
    let theta = spec.natural(values)?;
    spec.check_theta(&theta)?;
    Ok(theta)
}

fn points_of(spec: &FamilySpec, coords: &[f64], n_points: usize) -> Result<Vec<Point>, Fail> {
    let k = spec.space().chart_len();
    if coords.len() != n_points * k {
        return Err(invalid("point buffer length does not match n_points"));
    }
    coords
        .chunks(k)
        .map(|c| Point::from_coords(&spec.space(), c).map_err(Fail::from))
        .collect()
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn homfam_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create a family handle. `n < 0` and `lambda = NaN` select the default variant.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homfam_family_new(
    name: *const c_char,
    n: i64,
    lambda: f64,
    out: *mut *mut HomfamFamily,
) -> HomfamStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let name = c_str(name, "name")?;
        let n = if n < 0 { None } else { Some(n as usize) };
        let lambda = if lambda.is_nan() { None } else { Some(lambda) };
        let spec = FamilySpec::new(FamilyTag::parse(name, n, lambda)?)?;
        *out = Box::into_raw(Box::new(HomfamFamily { spec }));
        Ok(())
    })
}

/// Release a handle created by `homfam_family_new`. Null is ignored.
///
/// # Safety
/// `family` must come from `homfam_family_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn homfam_family_free(family: *mut HomfamFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Length of the flat natural parameter, or 0 for a null handle.
///
/// # Safety
/// `family` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn homfam_family_natural_len(family: *const HomfamFamily) -> usize {
    family.as_ref().map_or(0, |f| f.spec.natural_len())
}

/// Number of chart coordinates per point, or 0 for a null handle.
///
/// # Safety
/// `family` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn homfam_family_chart_len(family: *const HomfamFamily) -> usize {
    family.as_ref().map_or(0, |f| f.spec.space().chart_len())
}

/// `A(θ)`, the log of the normalizing integral.
///
/// # Safety
/// `theta` must point to `theta_len` doubles and `out` to one double.
#[no_mangle]
pub unsafe extern "C" fn homfam_log_partition(
    family: *const HomfamFamily,
    theta: *const f64,
    theta_len: usize,
    out: *mut f64,
) -> HomfamStatus {
    guard(|| {
        let spec = handle(family)?;
        let theta = theta_of(spec, slice(theta, theta_len, "theta")?)?;
        let out = slice_mut(out, 1, "out")?;
        out[0] = spec.log_partition(&theta)?;
        Ok(())
    })
}

/// Log-densities of `n_points` points with respect to the family's base measure.
///
/// # Safety
/// `points` must hold `n_points * chart_len` doubles and `out` `n_points`.
#[no_mangle]
pub unsafe extern "C" fn homfam_log_density(
    family: *const HomfamFamily,
    theta: *const f64,
    theta_len: usize,
    points: *const f64,
    n_points: usize,
    out: *mut f64,
) -> HomfamStatus {
    guard(|| {
        let spec = handle(family)?;
        let theta = theta_of(spec, slice(theta, theta_len, "theta")?)?;
        let k = spec.space().chart_len();
        let pts = points_of(spec, slice(points, n_points * k, "points")?, n_points)?;
        let dens = spec.log_density_many(&theta, &pts)?;
        slice_mut(out, n_points, "out")?.copy_from_slice(&dens);
        Ok(())
    })
}

/// Draw `count` points; coordinates are written row by row into `out`.
///
/// # Safety
/// `out` must have room for `count * chart_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn homfam_sample(
    family: *const HomfamFamily,
    theta: *const f64,
    theta_len: usize,
    count: usize,
    seed: u64,
    out: *mut f64,
) -> HomfamStatus {
    guard(|| {
        let spec = handle(family)?;
        let theta = theta_of(spec, slice(theta, theta_len, "theta")?)?;
        let k = spec.space().chart_len();
        let out = slice_mut(out, count * k, "out")?;
        let draws = sample(spec, &theta, count, seed)?;
        for (row, p) in out.chunks_mut(k).zip(&draws) {
            row.copy_from_slice(&p.coords());
        }
        Ok(())
    })
}

/// Maximum likelihood estimate from `n_points` observations.
///
/// # Safety
/// `points` must hold `n_points * chart_len` doubles and `out_theta` `natural_len`.
#[no_mangle]
pub unsafe extern "C" fn homfam_fit(
    family: *const HomfamFamily,
    points: *const f64,
    n_points: usize,
    out_theta: *mut f64,
    out_len: usize,
) -> HomfamStatus {
    guard(|| {
        let spec = handle(family)?;
        if out_len != spec.natural_len() {
            return Err(invalid("out_len must equal the natural parameter length"));
        }
        let k = spec.space().chart_len();
        let pts = points_of(spec, slice(points, n_points * k, "points")?, n_points)?;
        let theta = fit_mle(spec, &pts)?;
        slice_mut(out_theta, out_len, "out_theta")?.copy_from_slice(&theta.flat());
        Ok(())
    })
}

/// Natural parameter from a JSON parameter document (either parameterization).
/// The document's family must match the handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_theta` hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn homfam_natural_from_document(
    family: *const HomfamFamily,
    json: *const c_char,
    out_theta: *mut f64,
    out_len: usize,
) -> HomfamStatus {
    guard(|| {
        let spec = handle(family)?;
        let doc = ParameterDocument::from_json_str(c_str(json, "json")?)?;
        let (doc_spec, theta) = doc.resolve()?;
        if doc_spec.tag != spec.tag {
            return Err(Fail(
                HomfamStatus::Usage,
                format!("document is for {}, handle is {}", doc_spec.name(), spec.name()),
            ));
        }
        if out_len != spec.natural_len() {
            return Err(invalid("out_len must equal the natural parameter length"));
        }
        slice_mut(out_theta, out_len, "out_theta")?.copy_from_slice(&theta.flat());
        Ok(())
    })
}
