//! C interface to `dtwhar`.
//!
//! Objects are opaque handles created and destroyed through this API. Every
//! fallible function returns a [`DtwharStatus`]; on failure a description is
//! available from [`dtwhar_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use dtwhar::{Error, PipelineModel, TimeSeries};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtwharStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Format = 4,
    Parse = 5,
    Consistency = 6,
    Io = 7,
    Panic = 8,
}

/// A time series of `len` observations with `dim` channels each.
pub struct DtwharSeries(TimeSeries);

/// A trained classification model.
pub struct DtwharModel(PipelineModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DtwharStatus {
    match e {
        Error::Domain(_) => DtwharStatus::Domain,
        Error::Format { .. } => DtwharStatus::Format,
        Error::Parse { .. } => DtwharStatus::Parse,
        Error::Consistency(_) => DtwharStatus::Consistency,
        Error::Io { .. } => DtwharStatus::Io,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (DtwharStatus, String)>) -> DtwharStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DtwharStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DtwharStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DtwharStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DtwharStatus, String) {
    (DtwharStatus::NullPointer, format!("{what} is null"))
}

unsafe fn series_ref<'a>(p: *const DtwharSeries, what: &str) -> Result<&'a TimeSeries, (DtwharStatus, String)> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn dtwhar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a series from `len * dim` row-major values.
///
/// # Safety
/// `values` must point to `len * dim` readable doubles and `out` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_series_new(
    values: *const f64,
    len: usize,
    dim: usize,
    out: *mut *mut DtwharSeries,
) -> DtwharStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let n = len
            .checked_mul(dim)
            .ok_or((DtwharStatus::InvalidArgument, "len * dim overflows".to_string()))?;
        let data = std::slice::from_raw_parts(values, n).to_vec();
        let series = TimeSeries::new(data, len, dim).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DtwharSeries(series)));
        Ok(())
    })
}

/// Releases a series; null is ignored.
///
/// # Safety
/// `series` must be null or a handle from [`dtwhar_series_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_series_free(series: *mut DtwharSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_series_len(series: *const DtwharSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Number of channels, or 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_series_dim(series: *const DtwharSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.dim())
}

/// Banded DTW distance between two equally shaped series.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_dtw_distance(
    a: *const DtwharSeries,
    b: *const DtwharSeries,
    bw: usize,
    out: *mut f64,
) -> DtwharStatus {
    guard(|| {
        let (a, b) = (series_ref(a, "a")?, series_ref(b, "b")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = dtwhar::dtw_distance(a, b, bw).map_err(lib_err)?;
        Ok(())
    })
}

/// Subsequence DTW distance with displacement window `dw`.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_dtwsubseq_distance(
    a: *const DtwharSeries,
    b: *const DtwharSeries,
    dw: usize,
    bw: usize,
    out: *mut f64,
) -> DtwharStatus {
    guard(|| {
        let (a, b) = (series_ref(a, "a")?, series_ref(b, "b")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = dtwhar::dtwsubseq_distance(a, b, dw, bw).map_err(lib_err)?;
        Ok(())
    })
}

/// Loads a model bundle directory written by `dtwhar train`.
///
/// # Safety
/// `dir` must be a NUL-terminated UTF-8 path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_model_load(dir: *const c_char, out: *mut *mut DtwharModel) -> DtwharStatus {
    guard(|| {
        if dir.is_null() {
            return Err(null("dir"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dir = CStr::from_ptr(dir)
            .to_str()
            .map_err(|_| (DtwharStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let model = PipelineModel::load(Path::new(dir)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DtwharModel(model)));
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must be null or a handle from [`dtwhar_model_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_model_free(model: *mut DtwharModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of templates in the model, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_model_num_templates(model: *const DtwharModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.templates.len())
}

/// Predicted activity label of one series.
///
/// # Safety
/// `model` and `series` must be live handles and `label` writable.
#[no_mangle]
pub unsafe extern "C" fn dtwhar_model_predict(
    model: *const DtwharModel,
    series: *const DtwharSeries,
    label: *mut u32,
) -> DtwharStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let series = series_ref(series, "series")?;
        if label.is_null() {
            return Err(null("label"));
        }
        *label = model.0.predict_series(series).map_err(lib_err)?;
        Ok(())
    })
}
