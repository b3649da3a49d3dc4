//! C ABI over `relsim`.
//!
//! Objects are opaque handles created by `relsim_*_parse` / `relsim_distances`
//! and released with the matching `_free`. Every fallible call returns a
//! [`RelsimStatus`]; on failure `relsim_last_error_message` describes the
//! error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relsim::clustering::{self, Affinity, Linkage, SpectralParams};
use relsim::dissimilarity::{pairwise_matrix, DissimilarityConfig, DistanceMatrix};
use relsim::evaluation::adjusted_rand_index;
use relsim::{ingest, Dataset};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    ComputeError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelsimLinkage {
    Average = 0,
    Complete = 1,
    Single = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelsimAffinity {
    OneMinus = 0,
    Gaussian = 1,
}

/// A parsed dataset.
pub struct RelsimDataset {
    inner: Dataset,
}

/// A symmetric distance matrix with its row ids.
pub struct RelsimMatrix {
    inner: DistanceMatrix,
    ids: Vec<CString>,
}

impl RelsimMatrix {
    fn new(inner: DistanceMatrix) -> Self {
        let ids = inner
            .ids
            .iter()
            .map(|s| CString::new(s.as_str()).unwrap_or_default())
            .collect();
        Self { inner, ids }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: RelsimStatus, msg: impl Into<String>) -> RelsimStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> RelsimStatus) -> RelsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(RelsimStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, RelsimStatus> {
    if text.is_null() {
        return Err(fail(RelsimStatus::NullPointer, "text is null"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(RelsimStatus::InvalidUtf8, "text is not valid UTF-8"))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn relsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn relsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a dataset in the line format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relsim_dataset_parse(
    text: *const c_char,
    out: *mut *mut RelsimDataset,
) -> RelsimStatus {
    guard(|| {
        if out.is_null() {
            return fail(RelsimStatus::NullPointer, "out is null");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ingest::parse_dataset(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RelsimDataset { inner }));
                RelsimStatus::Ok
            }
            Err(e) => fail(RelsimStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `ds` must come from `relsim_dataset_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn relsim_dataset_free(ds: *mut RelsimDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of target vertices, 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn relsim_dataset_target_count(ds: *const RelsimDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.targets().len())
}

/// Pairwise distances over the dataset's targets. `weights` points to five
/// values (ad, nad, cd, nd, ed) summing to 1. `workers` = 0 uses the
/// default thread pool.
///
/// # Safety
/// `ds` must be a live dataset, `weights` must point to 5 doubles and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relsim_distances(
    ds: *const RelsimDataset,
    weights: *const f64,
    depth: usize,
    workers: usize,
    out: *mut *mut RelsimMatrix,
) -> RelsimStatus {
    guard(|| {
        let (Some(ds), false, false) = (ds.as_ref(), weights.is_null(), out.is_null()) else {
            return fail(RelsimStatus::NullPointer, "null argument");
        };
        let mut w = [0.0; 5];
        w.copy_from_slice(std::slice::from_raw_parts(weights, 5));
        let cfg = DissimilarityConfig {
            weights: w,
            depth,
            ..Default::default()
        };
        if let Err(e) = cfg.validate() {
            return fail(RelsimStatus::InvalidArgument, e.to_string());
        }
        let workers = (workers > 0).then_some(workers);
        match pairwise_matrix(&ds.inner, &cfg, workers) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(RelsimMatrix::new(p.distance)));
                RelsimStatus::Ok
            }
            Err(e) => fail(RelsimStatus::ComputeError, e.to_string()),
        }
    })
}

/// Parses a matrix file (header of ids, then comma-separated rows).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relsim_matrix_parse(
    text: *const c_char,
    out: *mut *mut RelsimMatrix,
) -> RelsimStatus {
    guard(|| {
        if out.is_null() {
            return fail(RelsimStatus::NullPointer, "out is null");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ingest::parse_matrix(text) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(RelsimMatrix::new(m)));
                RelsimStatus::Ok
            }
            Err(e) => fail(RelsimStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `m` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn relsim_matrix_free(m: *mut RelsimMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix dimension, 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn relsim_matrix_dim(m: *const RelsimMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.len())
}

/// Id of row `i`, or null when out of range. Owned by the matrix.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn relsim_matrix_id(m: *const RelsimMatrix, i: usize) -> *const c_char {
    m.as_ref()
        .and_then(|m| m.ids.get(i))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `m` must be a live matrix handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relsim_matrix_get(
    m: *const RelsimMatrix,
    i: usize,
    j: usize,
    out: *mut f64,
) -> RelsimStatus {
    let (Some(m), false) = (m.as_ref(), out.is_null()) else {
        return fail(RelsimStatus::NullPointer, "null argument");
    };
    let n = m.inner.len();
    if i >= n || j >= n {
        return fail(
            RelsimStatus::InvalidArgument,
            format!("({i}, {j}) outside {n}x{n}"),
        );
    }
    *out = m.inner.get(i, j);
    RelsimStatus::Ok
}

/// Copies the matrix row-major into `buf`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live matrix handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn relsim_matrix_copy(
    m: *const RelsimMatrix,
    buf: *mut f64,
    len: usize,
) -> RelsimStatus {
    let (Some(m), false) = (m.as_ref(), buf.is_null()) else {
        return fail(RelsimStatus::NullPointer, "null argument");
    };
    let values = m.inner.values.as_slice();
    if len < values.len() {
        return fail(
            RelsimStatus::BufferTooSmall,
            format!("need {} doubles, got {len}", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    RelsimStatus::Ok
}

unsafe fn write_labels(labels: &[usize], out: *mut usize, len: usize) -> RelsimStatus {
    if out.is_null() {
        return fail(RelsimStatus::NullPointer, "labels buffer is null");
    }
    if len < labels.len() {
        return fail(
            RelsimStatus::BufferTooSmall,
            format!("need {} labels, got {len}", labels.len()),
        );
    }
    ptr::copy_nonoverlapping(labels.as_ptr(), out, labels.len());
    RelsimStatus::Ok
}

/// Agglomerative clustering into `k` clusters; writes one label per row.
///
/// # Safety
/// `m` must be a live matrix handle and `labels` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn relsim_cluster_agglomerative(
    m: *const RelsimMatrix,
    k: usize,
    linkage: RelsimLinkage,
    labels: *mut usize,
    len: usize,
) -> RelsimStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(RelsimStatus::NullPointer, "matrix is null");
        };
        let linkage = match linkage {
            RelsimLinkage::Average => Linkage::Average,
            RelsimLinkage::Complete => Linkage::Complete,
            RelsimLinkage::Single => Linkage::Single,
        };
        match clustering::agglomerative(&m.inner, k, linkage) {
            Ok(a) => write_labels(&a.labels, labels, len),
            Err(e) => fail(RelsimStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Spectral clustering into `k` clusters. `sigma` is read only for the
/// gaussian affinity.
///
/// # Safety
/// `m` must be a live matrix handle and `labels` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn relsim_cluster_spectral(
    m: *const RelsimMatrix,
    k: usize,
    affinity: RelsimAffinity,
    sigma: f64,
    restarts: usize,
    seed: u64,
    labels: *mut usize,
    len: usize,
) -> RelsimStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(RelsimStatus::NullPointer, "matrix is null");
        };
        let params = SpectralParams {
            affinity: match affinity {
                RelsimAffinity::OneMinus => Affinity::OneMinus,
                RelsimAffinity::Gaussian => Affinity::Gaussian { sigma },
            },
            kmeans_restarts: restarts,
            seed,
        };
        match clustering::spectral(&m.inner, k, &params) {
            Ok(o) => write_labels(&o.assignment.labels, labels, len),
            Err(e) => fail(RelsimStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Adjusted Rand index of two labelings of `n` items. NaN on null input.
///
/// # Safety
/// `a` and `b` must each point to `n` values.
#[no_mangle]
pub unsafe extern "C" fn relsim_ari(a: *const usize, b: *const usize, n: usize) -> f64 {
    if a.is_null() || b.is_null() {
        set_error("null labels");
        return f64::NAN;
    }
    let (a, b) = (
        std::slice::from_raw_parts(a, n),
        std::slice::from_raw_parts(b, n),
    );
    adjusted_rand_index(a, b)
}
