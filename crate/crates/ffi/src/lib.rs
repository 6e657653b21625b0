//! C ABI for the gauss-festoon library.
//!
//! Every fallible function returns a [`GfStatus`]; results are written
//! through out-pointers. On failure a human-readable message is kept in a
//! thread-local slot and can be read with [`gf_last_error_message`]. Objects
//! are exposed as opaque handles that must be released with their matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gauss_festoon::estimators::internal_angle;
use gauss_festoon::gauss::{critical_radius, sample_binomial};
use gauss_festoon::hull::{convex_hull, face_lattice, polytope_volume, PointCloud, Polytope};
use gauss_festoon::limit::{extreme_points, sample_limit_process, LimitPointSet, LimitWindow};
use gauss_festoon::rng::stream;
use gauss_festoon::Error;

/// Stream purpose tag for randomness drawn through the C interface.
const FFI_PURPOSE: u8 = 0xF0;

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DegenerateInput = 3,
    OriginNotInterior = 4,
    LambdaTooSmall = 5,
    MissingBeta = 6,
    TruncationDominates = 7,
    BufferTooSmall = 8,
    Internal = 99,
}

impl From<&Error> for GfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DegenerateInput { .. } | Error::TooFewPoints { .. } | Error::OriginOnFacetHull => {
                GfStatus::DegenerateInput
            }
            Error::OriginNotInterior => GfStatus::OriginNotInterior,
            Error::LambdaTooSmall { .. } => GfStatus::LambdaTooSmall,
            Error::MissingBeta { .. } => GfStatus::MissingBeta,
            Error::TruncationDominates { .. } => GfStatus::TruncationDominates,
            Error::DimensionMismatch { .. }
            | Error::OutOfRange(_)
            | Error::OutsideDomain(_)
            | Error::InstanceTooLarge { .. }
            | Error::Config(_) => GfStatus::InvalidArgument,
            Error::DegeneracyBudget { .. } | Error::Io(_) => GfStatus::Internal,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: GfStatus, msg: impl Into<String>) -> GfStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> GfStatus {
    let status = GfStatus::from(&e);
    fail(status, e.to_string())
}

/// Runs `body`, converting panics into [`GfStatus::Internal`].
fn guard<F: FnOnce() -> GfStatus>(body: F) -> GfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in library code".to_string());
            fail(GfStatus::Internal, msg)
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(GfStatus::NullPointer, concat!("null pointer argument `", stringify!($p), "`"));
        })+
    };
}

/// Message describing the most recent failure on this thread, or NULL if the
/// last call succeeded. The pointer stays valid until the next library call
/// on the same thread.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Version string of the library, statically allocated.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Opaque point cloud in R^d.
pub struct GfPointCloud {
    cloud: PointCloud,
}

/// Opaque convex hull together with the cloud it was built from.
pub struct GfHull {
    cloud: PointCloud,
    poly: Polytope,
    f_vector: Vec<usize>,
}

/// Opaque sample of the limiting Poisson process on a window.
pub struct GfLimitSample {
    points: LimitPointSet,
}

/// Copies `n * dim` row-major coordinates into a new point cloud.
///
/// # Safety
/// `coords` must point to `n * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_cloud_new(
    dim: usize,
    coords: *const f64,
    n: usize,
    out: *mut *mut GfPointCloud,
) -> GfStatus {
    guard(|| {
        non_null!(out);
        if n > 0 {
            non_null!(coords);
        }
        let Some(len) = n.checked_mul(dim) else {
            return fail(GfStatus::InvalidArgument, "n * dim overflows");
        };
        let data = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(coords, len).to_vec() };
        match PointCloud::new(dim, data) {
            Ok(cloud) => {
                *out = Box::into_raw(Box::new(GfPointCloud { cloud }));
                GfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Samples `n` i.i.d. standard Gaussian points in R^d from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_cloud_sample_gaussian(
    n: usize,
    dim: usize,
    seed: u64,
    out: *mut *mut GfPointCloud,
) -> GfStatus {
    guard(|| {
        non_null!(out);
        if dim == 0 {
            return fail(GfStatus::InvalidArgument, "dimension must be at least 1");
        }
        let mut rng = stream(seed, FFI_PURPOSE, 0, 0);
        let cloud = sample_binomial(n, dim, &mut rng);
        *out = Box::into_raw(Box::new(GfPointCloud { cloud }));
        GfStatus::Ok
    })
}

/// Number of points in the cloud.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_cloud_len(cloud: *const GfPointCloud, out: *mut usize) -> GfStatus {
    guard(|| {
        non_null!(cloud, out);
        *out = (*cloud).cloud.len();
        GfStatus::Ok
    })
}

/// Releases a point cloud. Passing NULL is a no-op.
///
/// # Safety
/// `cloud` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_cloud_free(cloud: *mut GfPointCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Builds the convex hull of a cloud. The cloud handle remains owned by the
/// caller.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_hull_new(cloud: *const GfPointCloud, out: *mut *mut GfHull) -> GfStatus {
    guard(|| {
        non_null!(cloud, out);
        let cloud = (*cloud).cloud.clone();
        match convex_hull(&cloud) {
            Ok(poly) => {
                let f_vector = face_lattice(&poly).f_vector();
                *out = Box::into_raw(Box::new(GfHull { cloud, poly, f_vector }));
                GfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Dimension of the hull's ambient space.
///
/// # Safety
/// `hull` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_hull_dim(hull: *const GfHull, out: *mut usize) -> GfStatus {
    guard(|| {
        non_null!(hull, out);
        *out = (*hull).poly.dim();
        GfStatus::Ok
    })
}

/// Writes the f-vector `(f_0, ..., f_{d-1})` into `buf`. `written` always
/// receives the required length; if `capacity` is smaller the call returns
/// [`GfStatus::BufferTooSmall`] and writes nothing to `buf`.
///
/// # Safety
/// `hull` must be a live handle; `buf` must hold `capacity` writable
/// elements (may be NULL when `capacity` is 0); `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_hull_f_vector(
    hull: *const GfHull,
    buf: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> GfStatus {
    guard(|| {
        non_null!(hull, written);
        let f = &(*hull).f_vector;
        *written = f.len();
        if capacity < f.len() {
            return fail(
                GfStatus::BufferTooSmall,
                format!("f-vector needs {} entries, buffer holds {capacity}", f.len()),
            );
        }
        non_null!(buf);
        ptr::copy_nonoverlapping(f.as_ptr(), buf, f.len());
        GfStatus::Ok
    })
}

/// d-dimensional volume of the hull.
///
/// # Safety
/// `hull` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_hull_volume(hull: *const GfHull, out: *mut f64) -> GfStatus {
    guard(|| {
        non_null!(hull, out);
        let h = &*hull;
        *out = polytope_volume(&h.poly, &h.cloud);
        GfStatus::Ok
    })
}

/// Releases a hull. Passing NULL is a no-op.
///
/// # Safety
/// `hull` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_hull_free(hull: *mut GfHull) {
    if !hull.is_null() {
        drop(Box::from_raw(hull));
    }
}

/// Critical radius `R(lambda)` of the Gaussian sample in dimension `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_critical_radius(lambda: f64, dim: usize, out: *mut f64) -> GfStatus {
    guard(|| {
        non_null!(out);
        match critical_radius(lambda, dim) {
            Ok(r) => {
                *out = r;
                GfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Internal angle `beta_{k,n}` of the regular simplex with `n + 1` vertices
/// at a k-face. `std_error` receives 0 for closed forms and the Monte Carlo
/// standard error otherwise; it may be NULL.
///
/// # Safety
/// `value` must be writable; `std_error` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gf_internal_angle(k: usize, n: usize, value: *mut f64, std_error: *mut f64) -> GfStatus {
    guard(|| {
        non_null!(value);
        match internal_angle(k, n) {
            Ok(a) => {
                *value = a.value;
                if !std_error.is_null() {
                    *std_error = a.std_error;
                }
                GfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Samples the limiting process on `[-half_width, half_width]^{dim_minus_1}`
/// times `(-inf, h_max]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_limit_sample(
    dim_minus_1: usize,
    half_width: f64,
    h_max: f64,
    seed: u64,
    out: *mut *mut GfLimitSample,
) -> GfStatus {
    guard(|| {
        non_null!(out);
        let window = match LimitWindow::new(half_width, h_max, dim_minus_1) {
            Ok(w) => w,
            Err(e) => return from_error(e),
        };
        let mut rng = stream(seed, FFI_PURPOSE, 1, 0);
        let points = sample_limit_process(&window, &mut rng);
        *out = Box::into_raw(Box::new(GfLimitSample { points }));
        GfStatus::Ok
    })
}

/// Number of sampled points.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_limit_point_count(sample: *const GfLimitSample, out: *mut usize) -> GfStatus {
    guard(|| {
        non_null!(sample, out);
        *out = (*sample).points.len();
        GfStatus::Ok
    })
}

/// Number of extreme points of the sample (points on the down-paraboloid
/// hull).
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_limit_extreme_count(sample: *const GfLimitSample, out: *mut usize) -> GfStatus {
    guard(|| {
        non_null!(sample, out);
        match extreme_points(&(*sample).points) {
            Ok(ext) => {
                *out = ext.len();
                GfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a limit sample. Passing NULL is a no-op.
///
/// # Safety
/// `sample` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_limit_sample_free(sample: *mut GfLimitSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}
