//! C ABI over `currentlab`.
//!
//! Currents cross the boundary as opaque handles created by the `*_read_scm`,
//! `*_parse_scm` and `*_boundary` functions and released with
//! [`currentlab_current_free`]. Every fallible call returns a [`CurrentlabStatus`];
//! on failure a message is kept per thread and read back with
//! [`currentlab_last_error_message`]. Output parameters are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use currentlab::current::scm;
use currentlab::energy::{minmax_spectrum, SpectrumOptions};
use currentlab::flat::{flat_distance, grid_complex, FlatOptions};
use currentlab::{Error, SimplicialCurrent};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentlabStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Reading or writing a file failed.
    Io = 3,
    /// Input text could not be parsed.
    Parse = 4,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 5,
    /// The computation itself failed (solver, geometry, missing cells).
    Computation = 6,
    /// The caller's buffer holds fewer values than requested.
    BufferTooSmall = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

/// Opaque handle to an integral simplicial current.
pub struct CurrentlabCurrent {
    inner: SimplicialCurrent,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CurrentlabStatus {
    match e {
        Error::Io { .. } => CurrentlabStatus::Io,
        Error::Parse { .. } | Error::Json(_) => CurrentlabStatus::Parse,
        Error::InvalidArgument(_) | Error::DimensionMismatch(_) | Error::InvalidCurrent(_) => {
            CurrentlabStatus::InvalidArgument
        }
        _ => CurrentlabStatus::Computation,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CurrentlabStatus, String)>) -> CurrentlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CurrentlabStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CurrentlabStatus::Panic
        }
    }
}

type Failure = (CurrentlabStatus, String);

fn lib_err(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> Failure {
    (CurrentlabStatus::NullPointer, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CurrentlabStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const CurrentlabCurrent, name: &str) -> Result<&'a SimplicialCurrent, Failure> {
    p.as_ref().map(|c| &c.inner).ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

fn boxed(t: SimplicialCurrent) -> *mut CurrentlabCurrent {
    Box::into_raw(Box::new(CurrentlabCurrent { inner: t }))
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn currentlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn currentlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads a current from an SCM file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_read_scm(
    path: *const c_char,
    out: *mut *mut CurrentlabCurrent,
) -> CurrentlabStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = scm::read_scm(path).map_err(lib_err)?;
        put(out, boxed(t), "out")
    })
}

/// Parses a current from SCM text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_parse_scm(
    text: *const c_char,
    out: *mut *mut CurrentlabCurrent,
) -> CurrentlabStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = scm::parse_scm(text).map_err(lib_err)?;
        put(out, boxed(t), "out")
    })
}

/// Writes a current to an SCM file.
///
/// # Safety
/// `current` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_write_scm(
    current: *const CurrentlabCurrent,
    path: *const c_char,
) -> CurrentlabStatus {
    guard(|| {
        let t = handle(current, "current")?;
        let path = str_arg(path, "path")?;
        scm::write_scm(t, path).map_err(lib_err)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `current` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_free(current: *mut CurrentlabCurrent) {
    if !current.is_null() {
        drop(Box::from_raw(current));
    }
}

/// Cell dimension `k`.
///
/// # Safety
/// `current` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_dim(current: *const CurrentlabCurrent, out: *mut usize) -> CurrentlabStatus {
    guard(|| put(out, handle(current, "current")?.dim(), "out"))
}

/// Dimension of the ambient space.
///
/// # Safety
/// `current` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_ambient_dim(
    current: *const CurrentlabCurrent,
    out: *mut usize,
) -> CurrentlabStatus {
    guard(|| put(out, handle(current, "current")?.ambient_dim(), "out"))
}

/// Number of cells with nonzero multiplicity.
///
/// # Safety
/// `current` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_cell_count(
    current: *const CurrentlabCurrent,
    out: *mut usize,
) -> CurrentlabStatus {
    guard(|| put(out, handle(current, "current")?.cells().len(), "out"))
}

/// Mass: sum of `|multiplicity| · volume` over cells.
///
/// # Safety
/// `current` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_mass(current: *const CurrentlabCurrent, out: *mut f64) -> CurrentlabStatus {
    guard(|| put(out, handle(current, "current")?.mass(), "out"))
}

/// Boundary as a new handle owned by the caller.
///
/// # Safety
/// `current` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_current_boundary(
    current: *const CurrentlabCurrent,
    out: *mut *mut CurrentlabCurrent,
) -> CurrentlabStatus {
    guard(|| {
        let t = handle(current, "current")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = t.boundary().map_err(lib_err)?;
        put(out, boxed(b), "out")
    })
}

/// The `count` smallest min-max eigenvalues, written to `values[0..count]`.
/// `capacity` is the length of `values`. `seed` drives the iterative solver's start block.
///
/// # Safety
/// `current` must be a live handle and `values` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn currentlab_spectrum(
    current: *const CurrentlabCurrent,
    count: usize,
    seed: u64,
    values: *mut f64,
    capacity: usize,
) -> CurrentlabStatus {
    guard(|| {
        let t = handle(current, "current")?;
        if values.is_null() {
            return Err(null("values"));
        }
        if capacity < count {
            return Err((
                CurrentlabStatus::BufferTooSmall,
                format!("{count} eigenvalues requested, buffer holds {capacity}"),
            ));
        }
        let opts = SpectrumOptions {
            seed,
            ..SpectrumOptions::default()
        };
        let res = minmax_spectrum(t, count, None, &opts).map_err(lib_err)?;
        std::slice::from_raw_parts_mut(values, count).copy_from_slice(&res.eigenvalues);
        Ok(())
    })
}

/// Flat distance between two currents of equal dimension inside the Freudenthal grid
/// complex on the box `[lo, hi]` with `resolution[i]` cells along axis `i`.
/// `ambient` is the length of the three arrays; `exact` selects rational arithmetic.
///
/// # Safety
/// `a` and `b` must be live handles, the three arrays must hold `ambient` entries and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn currentlab_flat_distance(
    a: *const CurrentlabCurrent,
    b: *const CurrentlabCurrent,
    lo: *const f64,
    hi: *const f64,
    resolution: *const usize,
    ambient: usize,
    exact: bool,
    out: *mut f64,
) -> CurrentlabStatus {
    guard(|| {
        let (ta, tb) = (handle(a, "a")?, handle(b, "b")?);
        if lo.is_null() || hi.is_null() || resolution.is_null() {
            return Err(null("box array"));
        }
        if ta.dim() != tb.dim() {
            return Err((
                CurrentlabStatus::InvalidArgument,
                format!("dimensions differ: {} and {}", ta.dim(), tb.dim()),
            ));
        }
        let lo = std::slice::from_raw_parts(lo, ambient);
        let hi = std::slice::from_raw_parts(hi, ambient);
        let res = std::slice::from_raw_parts(resolution, ambient);
        let cx = grid_complex(lo, hi, res, ta.dim()).map_err(lib_err)?;
        let opts = FlatOptions {
            exact,
            ..FlatOptions::default()
        };
        let cert = flat_distance(ta, tb, &cx, opts).map_err(lib_err)?;
        put(out, cert.value, "out")
    })
}
