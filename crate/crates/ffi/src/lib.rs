//! C interface to qcp-core.
//!
//! Objects are opaque handles created by `qcp_*_new`/generator functions and
//! released with the matching `qcp_*_free`. Every fallible function returns a
//! `QcpStatus`; the message of the last failure on the calling thread is
//! available through `qcp_last_error`.

use qcp_core::angle::angle_function;
use qcp_core::hirota::zgamma_pattern;
use qcp_core::io::{save, Document, Payload};
use qcp_core::pattern::{check_pattern, CirclePattern, Checks};
use qcp_core::projection::{generate_embedding, symmetric_plane, LiftedEmbedding, Offset};
use qcp_core::sg::{map_to_pattern, zgamma_map, DiscreteMap};
use qcp_core::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes. Values 2 and 3 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcpStatus {
    Ok = 0,
    NullPointer = 1,
    InputError = 2,
    NumericError = 3,
    OutOfRange = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque rhombic embedding.
pub struct QcpEmbedding(LiftedEmbedding);

/// Opaque circle pattern.
pub struct QcpPattern(CirclePattern);

/// Opaque square-grid Z^γ map.
pub struct QcpMap(DiscreteMap);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> QcpStatus {
    let code = if e.exit_code() == 3 { QcpStatus::NumericError } else { QcpStatus::InputError };
    set_error(e.to_string());
    code
}

fn guard(f: impl FnOnce() -> QcpStatus) -> QcpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            QcpStatus::Panic
        }
    }
}

fn null(what: &str) -> QcpStatus {
    set_error(format!("{what} is null"));
    QcpStatus::NullPointer
}

/// Message of the last failure on this thread. The pointer stays valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qcp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// f_θ(x) (order 0) or f′_θ(x) (order 1).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_angle_function(x: f64, theta: f64, order: u8, out: *mut f64) -> QcpStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match angle_function(x, theta, order) {
            Ok(v) => {
                *out = v;
                QcpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Rhombic embedding of the `folds`-fold symmetric plane with all offsets
/// equal to `offset`, restricted to the disk of radius `window`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_embedding_generate(
    folds: usize,
    offset: f64,
    window: f64,
    out: *mut *mut QcpEmbedding,
) -> QcpStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let r = symmetric_plane(folds, Offset::Diagonal(offset)).and_then(|p| generate_embedding(&p, window));
        match r {
            Ok(e) => {
                *out = Box::into_raw(Box::new(QcpEmbedding(e)));
                QcpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of vertices and faces.
///
/// # Safety
/// `e` must be a live handle; the output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_embedding_size(
    e: *const QcpEmbedding,
    vertices: *mut usize,
    faces: *mut usize,
) -> QcpStatus {
    guard(|| {
        if e.is_null() || vertices.is_null() || faces.is_null() {
            return null("argument");
        }
        let g = &(*e).0.graph;
        *vertices = g.num_vertices();
        *faces = g.num_faces();
        QcpStatus::Ok
    })
}

/// # Safety
/// `e` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcp_embedding_free(e: *mut QcpEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Square-grid Z^γ map on the window n + m ≤ 2·size.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_zgamma_map(gamma: f64, psi: f64, size: usize, out: *mut *mut QcpMap) -> QcpStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match zgamma_map(gamma, psi, size) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(QcpMap(m)));
                QcpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// f(n, m) as (re, im).
///
/// # Safety
/// `map` must be a live handle; `re` and `im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_map_value(map: *const QcpMap, n: i64, m: i64, re: *mut f64, im: *mut f64) -> QcpStatus {
    guard(|| {
        if map.is_null() || re.is_null() || im.is_null() {
            return null("argument");
        }
        match (*map).0.get(n, m) {
            Some(z) => {
                *re = z.re;
                *im = z.im;
                QcpStatus::Ok
            }
            None => {
                set_error(format!("({n}, {m}) outside the window"));
                QcpStatus::OutOfRange
            }
        }
    })
}

/// Circle pattern of a map.
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_map_pattern(map: *const QcpMap, out: *mut *mut QcpPattern) -> QcpStatus {
    guard(|| {
        if map.is_null() || out.is_null() {
            return null("argument");
        }
        match map_to_pattern(&(*map).0) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(QcpPattern(p.pattern)));
                QcpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcp_map_free(map: *mut QcpMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Quasicrystallic Z^γ pattern on the octant part of an embedding.
///
/// # Safety
/// `e` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_zgamma_quasi(e: *const QcpEmbedding, gamma: f64, out: *mut *mut QcpPattern) -> QcpStatus {
    guard(|| {
        if e.is_null() || out.is_null() {
            return null("argument");
        }
        match zgamma_pattern(&(*e).0, gamma, None) {
            Ok(z) => {
                *out = Box::into_raw(Box::new(QcpPattern(z.pattern)));
                QcpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of vertices and faces.
///
/// # Safety
/// `p` must be a live handle; the output pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_pattern_size(p: *const QcpPattern, vertices: *mut usize, faces: *mut usize) -> QcpStatus {
    guard(|| {
        if p.is_null() || vertices.is_null() || faces.is_null() {
            return null("argument");
        }
        *vertices = (*p).0.graph.num_vertices();
        *faces = (*p).0.graph.num_faces();
        QcpStatus::Ok
    })
}

/// Center (or intersection point) of vertex `v` and, for white vertices, the
/// radius (0 for black vertices).
///
/// # Safety
/// `p` must be a live handle; the output pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_pattern_vertex(
    p: *const QcpPattern,
    v: usize,
    x: *mut f64,
    y: *mut f64,
    radius: *mut f64,
) -> QcpStatus {
    guard(|| {
        if p.is_null() || x.is_null() || y.is_null() || radius.is_null() {
            return null("argument");
        }
        let pat = &(*p).0;
        if v >= pat.points.len() {
            set_error(format!("vertex {v} out of range"));
            return QcpStatus::OutOfRange;
        }
        *x = pat.points[v].re;
        *y = pat.points[v].im;
        *radius = pat.radii.0.get(&v).copied().unwrap_or(0.0);
        QcpStatus::Ok
    })
}

/// Counts immersion, overlap and convexity findings.
///
/// # Safety
/// `p` must be a live handle; the output pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_pattern_check(
    p: *const QcpPattern,
    immersion: *mut usize,
    overlaps: *mut usize,
    nonconvex: *mut usize,
) -> QcpStatus {
    guard(|| {
        if p.is_null() || immersion.is_null() || overlaps.is_null() || nonconvex.is_null() {
            return null("argument");
        }
        let r = check_pattern(&(*p).0, Checks::all());
        *immersion = r.immersion.len();
        *overlaps = r.overlaps.len();
        *nonconvex = r.nonconvex.len();
        QcpStatus::Ok
    })
}

/// Writes the pattern document as NUL-terminated JSON into `buf`. `needed`
/// receives the required size including the terminator; if `len` is too
/// small nothing is written and `QCP_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `p` must be a live handle, `buf` valid for `len` bytes (or null with
/// `len` 0) and `needed` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qcp_pattern_to_json(
    p: *const QcpPattern,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> QcpStatus {
    guard(|| {
        if p.is_null() || needed.is_null() {
            return null("argument");
        }
        let doc = Document::new(Payload::Pattern((*p).0.clone()), "ffi", &[]);
        let bytes = match save(&doc) {
            Ok(b) => b,
            Err(e) => return fail(e),
        };
        *needed = bytes.len() + 1;
        if buf.is_null() || len < bytes.len() + 1 {
            set_error(format!("buffer of {len} bytes, need {}", bytes.len() + 1));
            return QcpStatus::BufferTooSmall;
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        *buf.add(bytes.len()) = 0;
        QcpStatus::Ok
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcp_pattern_free(p: *mut QcpPattern) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
