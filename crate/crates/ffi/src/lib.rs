//! C ABI over `levicore`.
//!
//! Every entry point returns an `LcStatus`; results go through out-pointers.
//! On failure the message is kept per thread and read with
//! `lc_last_error_message`. Panics are caught at the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levicore::chain::PartitionLabel;
use levicore::config::RunConfig;
use levicore::levi::{levi_form_from_values, DefiningValues};
use levicore::linalg::{HermitianMatrix, C64};
use levicore::pipeline::{CoreRun, Pipeline};
use levicore::sets::PlanarCompactSet;
use levicore::witness::{finite_witness, witness_verify};
use levicore::LeviError;

/// Status codes. The non-zero values below 5 match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    Io = 1,
    Precondition = 2,
    NotStabilized = 3,
    InvariantBreach = 4,
    NullPointer = 5,
    InvalidArgument = 6,
    NotReady = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LcComplex {
    pub re: f64,
    pub im: f64,
}

impl From<LcComplex> for C64 {
    fn from(c: LcComplex) -> Self {
        C64::new(c.re, c.im)
    }
}

/// Opaque pipeline handle.
pub struct LcPipeline {
    pipeline: Pipeline,
    run: Option<CoreRun>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &LeviError) -> LcStatus {
    match e.exit_code() {
        1 => LcStatus::Io,
        3 => LcStatus::NotStabilized,
        4 => LcStatus::InvariantBreach,
        _ => LcStatus::Precondition,
    }
}

fn fail(status: LcStatus, msg: impl Into<String>) -> LcStatus {
    set_error(msg.into());
    status
}

fn guard<F: FnOnce() -> LcStatus>(f: F) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(LcStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn lift<T>(r: levicore::Result<T>) -> Result<T, LcStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a pipeline from a JSON run configuration.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_new(config_json: *const c_char, out: *mut *mut LcPipeline) -> LcStatus {
    guard(|| {
        if config_json.is_null() || out.is_null() {
            return fail(LcStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(config_json).to_str() else {
            return fail(LcStatus::InvalidArgument, "config is not UTF-8");
        };
        let built = RunConfig::from_json(text).and_then(Pipeline::new);
        match lift(built) {
            Ok(pipeline) => {
                *out = Box::into_raw(Box::new(LcPipeline { pipeline, run: None }));
                LcStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `p` must come from `lc_pipeline_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_free(p: *mut LcPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of boundary samples.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_sample_count(p: *const LcPipeline, out: *mut usize) -> LcStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(LcStatus::NullPointer, "null argument");
        };
        *out = p.pipeline.sample.len();
        LcStatus::Ok
    })
}

/// Classifies, builds the chain and partitions the boundary. Results stay in
/// the handle. On non-stabilization nothing is stored.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_run_core(p: *mut LcPipeline) -> LcStatus {
    guard(|| {
        let Some(p) = p.as_mut() else {
            return fail(LcStatus::NullPointer, "null handle");
        };
        match lift(p.pipeline.run_core()) {
            Ok(run) => {
                p.run = Some(run);
                LcStatus::Ok
            }
            Err(s) => s,
        }
    })
}

fn with_run<F: FnOnce(&CoreRun) -> LcStatus>(p: *const LcPipeline, f: F) -> LcStatus {
    // SAFETY: callers pass handles from `lc_pipeline_new`.
    match unsafe { p.as_ref() } {
        None => fail(LcStatus::NullPointer, "null handle"),
        Some(LcPipeline { run: None, .. }) => fail(LcStatus::NotReady, "call lc_pipeline_run_core first"),
        Some(LcPipeline { run: Some(r), .. }) => f(r),
    }
}

/// Weakly pseudoconvex sample count.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_weak_count(p: *const LcPipeline, out: *mut usize) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "null out");
        }
        with_run(p, |r| {
            *out = r.classified.weak_count();
            LcStatus::Ok
        })
    })
}

/// Number of chain stages, the stable one included.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_stage_count(p: *const LcPipeline, out: *mut usize) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "null out");
        }
        with_run(p, |r| {
            *out = r.chain.stages.len();
            LcStatus::Ok
        })
    })
}

/// Point count of stage `stage`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_stage_size(p: *const LcPipeline, stage: usize, out: *mut usize) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "null out");
        }
        with_run(p, |r| match r.chain.stages.get(stage) {
            Some(s) => {
                *out = s.len();
                LcStatus::Ok
            }
            None => fail(LcStatus::InvalidArgument, format!("stage {stage} out of range")),
        })
    })
}

/// Writes one partition code per sample: -1 strongly pseudoconvex, `a >= 0`
/// dropped while deriving stage `a + 1`, and the last stage index for the
/// core. `len` must equal the sample count.
///
/// # Safety
/// `p` must be a live handle and `labels` must hold `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn lc_pipeline_partition(p: *const LcPipeline, labels: *mut i64, len: usize) -> LcStatus {
    guard(|| {
        if labels.is_null() {
            return fail(LcStatus::NullPointer, "null labels");
        }
        with_run(p, |r| {
            let n = r.partition.labels.len();
            if len != n {
                return fail(LcStatus::InvalidArgument, format!("buffer holds {len} labels, need {n}"));
            }
            let core_stage = (r.chain.stages.len() - 1) as i64;
            let out = std::slice::from_raw_parts_mut(labels, len);
            for (o, l) in out.iter_mut().zip(&r.partition.labels) {
                *o = match l {
                    PartitionLabel::Strong => -1,
                    PartitionLabel::Dropped { stage } => *stage as i64,
                    PartitionLabel::Core => core_stage,
                };
            }
            LcStatus::Ok
        })
    })
}

/// Levi eigenvalues (ascending, `n - 1` of them) at a boundary point of
/// `C^n`. `grad` holds `rho_{z_j}` and `hessian` is row-major with
/// `hessian[j * n + k] = rho_{z_j zbar_k}`.
///
/// # Safety
/// `point` and `grad` must hold `n` entries, `hessian` `n * n`, `eigenvalues` `n - 1`.
#[no_mangle]
pub unsafe extern "C" fn lc_levi_eigenvalues(
    n: usize,
    point: *const LcComplex,
    rho: f64,
    grad: *const LcComplex,
    hessian: *const LcComplex,
    eigenvalues: *mut f64,
) -> LcStatus {
    guard(|| {
        if point.is_null() || grad.is_null() || hessian.is_null() || eigenvalues.is_null() {
            return fail(LcStatus::NullPointer, "null argument");
        }
        if n < 2 {
            return fail(LcStatus::InvalidArgument, "need n >= 2");
        }
        let conv = |p: *const LcComplex, len: usize| -> Vec<C64> {
            std::slice::from_raw_parts(p, len).iter().map(|&c| c.into()).collect()
        };
        let result = HermitianMatrix::new(n, conv(hessian, n * n)).and_then(|h| {
            let values = DefiningValues { rho, grad: conv(grad, n), hessian: h };
            levi_form_from_values(&conv(point, n), &values)
        });
        match lift(result) {
            Ok(a) => {
                std::slice::from_raw_parts_mut(eigenvalues, n - 1).copy_from_slice(&a.eigenvalues);
                LcStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Builds the witness `M |z - p_i|^2` for a finite set and verifies it on a
/// grid of spacing `h`. `pass` receives 1 or 0.
///
/// # Safety
/// `points` must hold `len` entries and `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_finite_witness_verify(
    points: *const LcComplex,
    len: usize,
    m: f64,
    h: f64,
    pass: *mut i32,
) -> LcStatus {
    guard(|| {
        if points.is_null() || pass.is_null() {
            return fail(LcStatus::NullPointer, "null argument");
        }
        let pts: Vec<C64> = std::slice::from_raw_parts(points, len).iter().map(|&c| c.into()).collect();
        let verdict = finite_witness(&pts, m).and_then(|c| witness_verify(&c, &PlanarCompactSet::Finite(pts.clone()), h));
        match lift(verdict) {
            Ok(v) => {
                *pass = v.pass as i32;
                LcStatus::Ok
            }
            Err(s) => s,
        }
    })
}
