//! C ABI for `symentropy`.
//!
//! Every fallible function returns an [`SeStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`se_last_error_message`]. Handles are opaque and must be
//! released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symentropy::direct::{entropy_direct, subentropy_direct};
use symentropy::haar::{estimate_q, HaarConfig};
use symentropy::halfaxis::{dh, dq, entropy_e, subentropy_e, MultiIndex};
use symentropy::identities::hq_upper_bounds;
use symentropy::sympoly::elementary_symmetric;
use symentropy::{Direction, Error, ProbVector, QuadratureConfig, SymPolyPoint};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Quadrature = 3,
    Convergence = 4,
    Contour = 5,
    /// The quantity is infinite; the out value holds a signed infinity.
    Divergent = 6,
    NotComparable = 7,
    Panic = 8,
}

/// Quadrature settings.
pub struct SeConfig(QuadratureConfig);

/// A point `(e_1, ..., e_d)` with non-negative coordinates.
pub struct SePoint(SymPolyPoint);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeUpperBounds {
    pub a: f64,
    pub b: f64,
    pub h_bound: f64,
    pub q_bound: f64,
    pub hu_bound: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeHaarEstimate {
    pub mean_hm: f64,
    pub std_error: f64,
    pub implied_q: f64,
    pub reference_q: f64,
    pub z_score: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SeStatus {
    match err {
        Error::DomainViolation(_) => SeStatus::Domain,
        Error::QuadratureFailure { .. } => SeStatus::Quadrature,
        Error::ConvergenceFailure { .. } => SeStatus::Convergence,
        Error::ContourViolation(_) => SeStatus::Contour,
        Error::DivergentIntegral { .. } => SeStatus::Divergent,
        Error::NotComparable => SeStatus::NotComparable,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (SeStatus, String)>) -> SeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SeStatus::Panic
        }
    }
}

fn lib(err: Error) -> (SeStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (SeStatus, String) {
    (SeStatus::NullPointer, format!("{name} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], (SeStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (SeStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn config<'a>(cfg: *const SeConfig) -> &'a QuadratureConfig {
    static DEFAULT: std::sync::OnceLock<QuadratureConfig> = std::sync::OnceLock::new();
    match cfg.as_ref() {
        Some(c) => &c.0,
        None => DEFAULT.get_or_init(QuadratureConfig::default),
    }
}

/// Writes a signed infinity for a divergent result and passes other errors on.
unsafe fn scalar(out: *mut f64, r: symentropy::Result<f64>) -> Result<(), (SeStatus, String)> {
    match r {
        Ok(v) => write(out, v),
        Err(err @ Error::DivergentIntegral { direction, .. }) => {
            let inf = match direction {
                Direction::PositiveInfinity => f64::INFINITY,
                Direction::NegativeInfinity => f64::NEG_INFINITY,
            };
            write(out, inf)?;
            Err(lib(err))
        }
        Err(err) => Err(lib(err)),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn se_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator, or 0 if there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn se_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a quadrature configuration.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn se_config_new(
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
    out: *mut *mut SeConfig,
) -> SeStatus {
    guard(|| {
        let cfg = QuadratureConfig::new(rel_tol, abs_tol, max_subdivisions).map_err(lib)?;
        write(out, Box::into_raw(Box::new(SeConfig(cfg))))
    })
}

/// # Safety
/// `cfg` must come from [`se_config_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn se_config_free(cfg: *mut SeConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Creates a point from `d` coordinates `e_1..e_d`.
///
/// # Safety
/// `coeffs` must be valid for `d` reads and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn se_point_new(coeffs: *const f64, d: usize, out: *mut *mut SePoint) -> SeStatus {
    guard(|| {
        let e = SymPolyPoint::new(slice(coeffs, d, "coeffs")?.to_vec()).map_err(lib)?;
        write(out, Box::into_raw(Box::new(SePoint(e))))
    })
}

/// Creates the point of elementary symmetric polynomials of `x`.
///
/// # Safety
/// `x` must be valid for `d` reads and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn se_point_from_probabilities(x: *const f64, d: usize, out: *mut *mut SePoint) -> SeStatus {
    guard(|| {
        let p = ProbVector::new(slice(x, d, "x")?.to_vec()).map_err(lib)?;
        write(out, Box::into_raw(Box::new(SePoint(elementary_symmetric(&p)))))
    })
}

/// Dimension of the point, or 0 for null.
///
/// # Safety
/// `point` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn se_point_dim(point: *const SePoint) -> usize {
    point.as_ref().map_or(0, |p| p.0.dim())
}

/// # Safety
/// `point` must come from a `se_point_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn se_point_free(point: *mut SePoint) {
    if !point.is_null() {
        drop(Box::from_raw(point));
    }
}

/// Entropy from the coordinates. A null `cfg` uses the default settings.
///
/// # Safety
/// `point` must be a live handle, `cfg` a live handle or null, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn se_entropy(point: *const SePoint, cfg: *const SeConfig, out: *mut f64) -> SeStatus {
    guard(|| {
        let p = point.as_ref().ok_or_else(|| null("point"))?;
        scalar(out, entropy_e(&p.0, config(cfg)))
    })
}

/// Subentropy from the coordinates. A null `cfg` uses the default settings.
///
/// # Safety
/// As for [`se_entropy`].
#[no_mangle]
pub unsafe extern "C" fn se_subentropy(point: *const SePoint, cfg: *const SeConfig, out: *mut f64) -> SeStatus {
    guard(|| {
        let p = point.as_ref().ok_or_else(|| null("point"))?;
        scalar(out, subentropy_e(&p.0, config(cfg)))
    })
}

/// Entropy and subentropy straight from `x`.
///
/// # Safety
/// `x` must be valid for `d` reads; `h` and `q` must be valid.
#[no_mangle]
pub unsafe extern "C" fn se_entropy_direct(x: *const f64, d: usize, h: *mut f64, q: *mut f64) -> SeStatus {
    guard(|| {
        let p = ProbVector::new(slice(x, d, "x")?.to_vec()).map_err(lib)?;
        write(h, entropy_direct(&p))?;
        write(q, subentropy_direct(&p))
    })
}

unsafe fn derivative(
    point: *const SePoint,
    indices: *const usize,
    order: usize,
    cfg: *const SeConfig,
    out: *mut f64,
    f: fn(&SymPolyPoint, &MultiIndex, &QuadratureConfig) -> symentropy::Result<f64>,
) -> SeStatus {
    guard(|| {
        let p = point.as_ref().ok_or_else(|| null("point"))?;
        let idx = MultiIndex::new(slice(indices, order, "indices")?.to_vec(), p.0.dim()).map_err(lib)?;
        scalar(out, f(&p.0, &idx, config(cfg)))
    })
}

/// Mixed partial derivative of the entropy with respect to
/// `e_{indices[0]}, ..., e_{indices[order-1]}` (1-based). Returns
/// `Divergent` with a signed infinity in `out` when the integral diverges.
///
/// # Safety
/// `indices` must be valid for `order` reads; otherwise as for [`se_entropy`].
#[no_mangle]
pub unsafe extern "C" fn se_dh(
    point: *const SePoint,
    indices: *const usize,
    order: usize,
    cfg: *const SeConfig,
    out: *mut f64,
) -> SeStatus {
    derivative(point, indices, order, cfg, out, dh)
}

/// Subentropy analogue of [`se_dh`].
///
/// # Safety
/// As for [`se_dh`].
#[no_mangle]
pub unsafe extern "C" fn se_dq(
    point: *const SePoint,
    indices: *const usize,
    order: usize,
    cfg: *const SeConfig,
    out: *mut f64,
) -> SeStatus {
    derivative(point, indices, order, cfg, out, dq)
}

/// Upper bounds on entropy and subentropy given `e_1`, `e_2` and `d`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn se_upper_bounds(e1: f64, e2: f64, d: usize, out: *mut SeUpperBounds) -> SeStatus {
    guard(|| {
        let b = hq_upper_bounds(e1, e2, d).map_err(lib)?;
        write(
            out,
            SeUpperBounds {
                a: b.a,
                b: b.b,
                h_bound: b.h_bound,
                q_bound: b.q_bound,
                hu_bound: b.hu_bound,
            },
        )
    })
}

/// Monte Carlo estimate of the subentropy of a diagonal state from
/// Haar-random measurement bases.
///
/// # Safety
/// `eigenvalues` must be valid for `d` reads and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn se_haar_estimate(
    eigenvalues: *const f64,
    d: usize,
    samples: usize,
    seed: u64,
    out: *mut SeHaarEstimate,
) -> SeStatus {
    guard(|| {
        let p = ProbVector::new(slice(eigenvalues, d, "eigenvalues")?.to_vec()).map_err(lib)?;
        let cfg = HaarConfig::new(p, samples, seed).map_err(lib)?;
        let est = estimate_q(&cfg);
        write(
            out,
            SeHaarEstimate {
                mean_hm: est.mean_hm,
                std_error: est.std_error,
                implied_q: est.implied_q,
                reference_q: est.reference_q,
                z_score: est.z_score,
            },
        )
    })
}
