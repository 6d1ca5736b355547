//! C ABI for `qudit-ssa`.
//!
//! States, placements and grouping specs cross the boundary as opaque
//! handles created by `qssa_*_new`-style constructors and released with the
//! matching `qssa_*_free`. Every fallible call returns a [`QssaStatus`];
//! `qssa_last_error_message` describes the most recent failure on the
//! calling thread. Matrices are passed row-major as separate real and
//! imaginary `double` arrays.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qudit_ssa::inequalities::{self, GroupingSpec, InequalityVerdict};
use qudit_ssa::numerics::CMatrix;
use qudit_ssa::placements::{self, IndexPlacement, PlacementFile};
use qudit_ssa::states::{self, DensityMatrix, ProbabilityVector, RandomSource};
use qudit_ssa::{tomography, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QssaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    NegativeEntry = 4,
    NonHermitian = 5,
    TraceNotOne = 6,
    NotPositive = 7,
    DimensionMismatch = 8,
    BadShape = 9,
    BadAxes = 10,
    ArityMismatch = 11,
    UnsupportedSpin = 12,
    ParseError = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

/// Mirror of an inequality verdict; the check holds when
/// `gap >= -tolerance`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QssaVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub tolerance: f64,
}

impl From<InequalityVerdict> for QssaVerdict {
    fn from(v: InequalityVerdict) -> Self {
        Self {
            lhs: v.lhs,
            rhs: v.rhs,
            gap: v.gap,
            holds: v.holds,
            tolerance: v.tolerance,
        }
    }
}

pub struct QssaProbabilityVector(ProbabilityVector);
pub struct QssaDensityMatrix(DensityMatrix);
pub struct QssaPlacement(IndexPlacement);
pub struct QssaGroupingSpec(GroupingSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl Into<Vec<u8>>) {
    let text = CString::new(message).unwrap_or_else(|_| CString::from(c"error message contained NUL"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(e: &Error) -> QssaStatus {
    match e {
        Error::NotNormalized { .. } => QssaStatus::NotNormalized,
        Error::NegativeEntry { .. } | Error::NegativeInput { .. } => QssaStatus::NegativeEntry,
        Error::NonHermitian { .. } | Error::NonSquare { .. } => QssaStatus::NonHermitian,
        Error::TraceNotOne { .. } => QssaStatus::TraceNotOne,
        Error::NotPositive { .. } => QssaStatus::NotPositive,
        Error::DimensionMismatch { .. } | Error::ShapeMismatch | Error::BadDimension(_) => {
            QssaStatus::DimensionMismatch
        }
        Error::BadShape(_) | Error::ShapeTooSmall { .. } | Error::BadAssignment(_) => QssaStatus::BadShape,
        Error::BadAxes { .. } => QssaStatus::BadAxes,
        Error::ArityMismatch { .. } => QssaStatus::ArityMismatch,
        Error::UnsupportedSpin { .. } | Error::BadSpin { .. } => QssaStatus::UnsupportedSpin,
        _ => QssaStatus::InvalidArgument,
    }
}

struct Failure(QssaStatus);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        set_last_error(e.to_string());
        Failure(status_of(&e))
    }
}

fn fail<T>(status: QssaStatus, message: &str) -> Result<T, Failure> {
    set_last_error(message);
    Err(Failure(status))
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QssaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QssaStatus::Ok,
        Ok(Err(Failure(status))) => status,
        Err(_) => {
            set_last_error("internal panic");
            QssaStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    if p.is_null() {
        return fail(QssaStatus::NullPointer, "null handle");
    }
    Ok(&*p)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(QssaStatus::NullPointer, "null array");
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(QssaStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    Ok(())
}

unsafe fn string<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(QssaStatus::NullPointer, "null string");
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(QssaStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qssa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---- probability vectors ----

/// Validates `len` probabilities into a new vector handle.
#[no_mangle]
pub unsafe extern "C" fn qssa_vector_new(
    data: *const f64,
    len: usize,
    out: *mut *mut QssaProbabilityVector,
) -> QssaStatus {
    guard(|| {
        let p = states::validate_probability_vector(slice(data, len)?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(QssaProbabilityVector(p))))
    })
}

/// Uniform simplex sample for `(seed, stream)`.
#[no_mangle]
pub unsafe extern "C" fn qssa_vector_sample(
    n: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut QssaProbabilityVector,
) -> QssaStatus {
    guard(|| {
        let p = states::sample_probability_vector(n, &mut RandomSource::new(seed, stream))?;
        write_out(out, Box::into_raw(Box::new(QssaProbabilityVector(p))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qssa_vector_free(v: *mut QssaProbabilityVector) {
    free_handle(v)
}

#[no_mangle]
pub unsafe extern "C" fn qssa_vector_len(v: *const QssaProbabilityVector) -> usize {
    v.as_ref().map_or(0, |v| v.0.len())
}

/// Copies the components into `buffer` (capacity `len`).
#[no_mangle]
pub unsafe extern "C" fn qssa_vector_read(v: *const QssaProbabilityVector, buffer: *mut f64, len: usize) -> QssaStatus {
    guard(|| {
        let v = borrow(v)?;
        if len < v.0.len() {
            return fail(QssaStatus::BufferTooSmall, "buffer shorter than the vector");
        }
        if buffer.is_null() {
            return fail(QssaStatus::NullPointer, "null buffer");
        }
        ptr::copy_nonoverlapping(v.0.as_slice().as_ptr(), buffer, v.0.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qssa_vector_shannon_entropy(v: *const QssaProbabilityVector, out: *mut f64) -> QssaStatus {
    guard(|| write_out(out, states::shannon_entropy(&borrow(v)?.0)))
}

// ---- density matrices ----

/// Validates an `n x n` row-major matrix. `im` may be null for a real
/// matrix.
#[no_mangle]
pub unsafe extern "C" fn qssa_density_new(
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut *mut QssaDensityMatrix,
) -> QssaStatus {
    guard(|| {
        let re = slice(re, n * n)?;
        let im = if im.is_null() { None } else { Some(slice(im, n * n)?) };
        let m = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(re[i * n + j], im.map_or(0.0, |im| im[i * n + j]))
        });
        let rho = states::validate_density_matrix(m)?;
        write_out(out, Box::into_raw(Box::new(QssaDensityMatrix(rho))))
    })
}

/// Ginibre sample of the given rank for `(seed, stream)`.
#[no_mangle]
pub unsafe extern "C" fn qssa_density_sample(
    n: usize,
    rank: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut QssaDensityMatrix,
) -> QssaStatus {
    guard(|| {
        let rho = states::sample_density_matrix(n, rank, &mut RandomSource::new(seed, stream))?;
        write_out(out, Box::into_raw(Box::new(QssaDensityMatrix(rho))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qssa_density_free(rho: *mut QssaDensityMatrix) {
    free_handle(rho)
}

#[no_mangle]
pub unsafe extern "C" fn qssa_density_dim(rho: *const QssaDensityMatrix) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

unsafe fn write_matrix(m: &DensityMatrix, re: *mut f64, im: *mut f64, capacity: usize) -> Result<(), Failure> {
    let n = m.dim();
    if capacity < n * n {
        return fail(QssaStatus::BufferTooSmall, "buffer shorter than the matrix");
    }
    if re.is_null() || im.is_null() {
        return fail(QssaStatus::NullPointer, "null buffer");
    }
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            re.add(i * n + j).write(z.re);
            im.add(i * n + j).write(z.im);
        }
    }
    Ok(())
}

/// Copies the matrix row-major into `re`/`im` (each of capacity
/// `capacity >= n*n`).
#[no_mangle]
pub unsafe extern "C" fn qssa_density_read(
    rho: *const QssaDensityMatrix,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
) -> QssaStatus {
    guard(|| write_matrix(&borrow(rho)?.0, re, im, capacity))
}

#[no_mangle]
pub unsafe extern "C" fn qssa_density_von_neumann_entropy(rho: *const QssaDensityMatrix, out: *mut f64) -> QssaStatus {
    guard(|| write_out(out, states::von_neumann_entropy(&borrow(rho)?.0)?))
}

// ---- placements ----

/// Lexicographic placement of `n` components into a lattice with `axes`
/// dimensions taken from `shape`.
#[no_mangle]
pub unsafe extern "C" fn qssa_placement_lex(
    n: usize,
    shape: *const usize,
    axes: usize,
    out: *mut *mut QssaPlacement,
) -> QssaStatus {
    guard(|| {
        let p = placements::lex_placement(n, slice(shape, axes)?)?;
        write_out(out, Box::into_raw(Box::new(QssaPlacement(p))))
    })
}

/// Parses the placement JSON format (`{"shape": [...], "assignment": [...]}`,
/// 1-based cells).
#[no_mangle]
pub unsafe extern "C" fn qssa_placement_from_json(json: *const c_char, out: *mut *mut QssaPlacement) -> QssaStatus {
    guard(|| {
        let file: PlacementFile = match serde_json_from(string(json)?) {
            Ok(f) => f,
            Err(msg) => return fail(QssaStatus::ParseError, &msg),
        };
        write_out(out, Box::into_raw(Box::new(QssaPlacement(file.resolve()?))))
    })
}

fn serde_json_from<T: for<'de> serde::Deserialize<'de>>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// Permutes a placement: component `k` takes the cell of `sigma[k]`
/// (0-based).
#[no_mangle]
pub unsafe extern "C" fn qssa_placement_permuted(
    base: *const QssaPlacement,
    sigma: *const usize,
    len: usize,
    out: *mut *mut QssaPlacement,
) -> QssaStatus {
    guard(|| {
        let p = placements::permuted_placement(&borrow(base)?.0, slice(sigma, len)?)?;
        write_out(out, Box::into_raw(Box::new(QssaPlacement(p))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qssa_placement_free(p: *mut QssaPlacement) {
    free_handle(p)
}

/// Partial trace of the embedded state onto the (0-based) `keep` axes.
/// Writes the reduced dimension to `out_dim` and the matrix row-major to
/// `re`/`im` when `capacity` suffices.
#[no_mangle]
pub unsafe extern "C" fn qssa_partial_trace(
    rho: *const QssaDensityMatrix,
    placement: *const QssaPlacement,
    keep: *const usize,
    keep_len: usize,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    out_dim: *mut usize,
) -> QssaStatus {
    guard(|| {
        let shaped = placements::embed_density(&borrow(rho)?.0, &borrow(placement)?.0)?;
        let reduced = placements::partial_trace(&shaped, slice(keep, keep_len)?)?;
        write_out(out_dim, reduced.density().dim())?;
        write_matrix(reduced.density(), re, im, capacity)
    })
}

// ---- inequality checks ----

/// Subadditivity (2-axis placement) or strong subadditivity (3-axis) of a
/// probability vector.
#[no_mangle]
pub unsafe extern "C" fn qssa_check_classical(
    v: *const QssaProbabilityVector,
    placement: *const QssaPlacement,
    out: *mut QssaVerdict,
) -> QssaStatus {
    guard(|| {
        let verdict = inequalities::classical_verdict(&borrow(v)?.0, &borrow(placement)?.0)?;
        write_out(out, verdict.into())
    })
}

/// Quantum counterpart of [`qssa_check_classical`].
#[no_mangle]
pub unsafe extern "C" fn qssa_check_quantum(
    rho: *const QssaDensityMatrix,
    placement: *const QssaPlacement,
    out: *mut QssaVerdict,
) -> QssaStatus {
    guard(|| {
        let verdict = inequalities::quantum_verdict(&borrow(rho)?.0, &borrow(placement)?.0)?;
        write_out(out, verdict.into())
    })
}

/// Parses a grouping spec (`{"n": N, "lhs": [...], "rhs": [...]}`).
#[no_mangle]
pub unsafe extern "C" fn qssa_grouping_from_json(json: *const c_char, out: *mut *mut QssaGroupingSpec) -> QssaStatus {
    guard(|| {
        let spec: GroupingSpec = match serde_json_from(string(json)?) {
            Ok(s) => s,
            Err(msg) => return fail(QssaStatus::ParseError, &msg),
        };
        spec.validate()?;
        write_out(out, Box::into_raw(Box::new(QssaGroupingSpec(spec))))
    })
}

/// One of the bundled specs by name, e.g. `"eq12"`.
#[no_mangle]
pub unsafe extern "C" fn qssa_grouping_bundled(name: *const c_char, out: *mut *mut QssaGroupingSpec) -> QssaStatus {
    guard(|| match inequalities::bundled_spec(string(name)?) {
        Some(spec) => write_out(out, Box::into_raw(Box::new(QssaGroupingSpec(spec)))),
        None => fail(QssaStatus::InvalidArgument, "no bundled spec with that name"),
    })
}

#[no_mangle]
pub unsafe extern "C" fn qssa_grouping_free(spec: *mut QssaGroupingSpec) {
    free_handle(spec)
}

#[no_mangle]
pub unsafe extern "C" fn qssa_evaluate_grouping(
    v: *const QssaProbabilityVector,
    spec: *const QssaGroupingSpec,
    tolerance: f64,
    out: *mut QssaVerdict,
) -> QssaStatus {
    guard(|| {
        let verdict = inequalities::evaluate_grouping(&borrow(v)?.0, &borrow(spec)?.0, tolerance)?;
        write_out(out, verdict.into())
    })
}

// ---- tomography ----

/// Spin tomogram of `rho` along `(theta, phi)`, written to `w` (capacity
/// `len >= dim`) in ascending `m`.
#[no_mangle]
pub unsafe extern "C" fn qssa_tomogram(
    rho: *const QssaDensityMatrix,
    theta: f64,
    phi: f64,
    w: *mut f64,
    len: usize,
) -> QssaStatus {
    guard(|| {
        let t = tomography::compute_tomogram(&borrow(rho)?.0, theta, phi)?;
        if len < t.w.len() {
            return fail(QssaStatus::BufferTooSmall, "buffer shorter than the tomogram");
        }
        if w.is_null() {
            return fail(QssaStatus::NullPointer, "null buffer");
        }
        ptr::copy_nonoverlapping(t.w.as_slice().as_ptr(), w, t.w.len());
        Ok(())
    })
}
