//! C interface.
//!
//! Datasets and fits are opaque handles created and freed through this API.
//! Every fallible function returns a [`ZcStatus`]; on failure the message is
//! available from [`zc_last_error`] on the same thread. Strings returned to
//! the caller are freed with [`zc_string_free`].
//!
//! Counts passed in are raw (uncited = 0); evaluation points `n` are on the
//! shifted support starting at 1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use zicount::fitting::{fit_all_models, fit_base, fit_zero_inflated};
use zicount::ingest::InputFormat;
use zicount::report::{to_json, ComparisonRecord, FitRecord};
use zicount::sampling::{sample, SyntheticSpec};
use zicount::zero_inflation::{zi_cdf, zi_pmf};
use zicount::{CountDataset, Error, Family, FamilyParams, FitResult, RawCounts, SearchConfig, ZeroInflatedModel};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZcStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Parse = 3,
    Usage = 4,
    EmptyDataset = 5,
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZcFamily {
    /// Discretised lognormal: `first` = mu, `second` = sigma.
    Dln = 0,
    /// Hooked power law: `first` = alpha, `second` = B (shifted convention).
    Hooked = 1,
}

/// A model: a base family and the probability `p` of the extra point mass at 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZcModel {
    pub family: ZcFamily,
    pub first: f64,
    pub second: f64,
    pub p: f64,
}

/// Summary of a fit. `params.p` is k / n_total for inflated fits and 0 otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZcFitSummary {
    pub params: ZcModel,
    pub zero_inflated: bool,
    pub k: u64,
    pub n_total: u64,
    pub r: u64,
    pub loglik: f64,
    pub aic: f64,
    pub ks: f64,
    pub converged: bool,
    pub evaluations: u64,
}

/// Opaque dataset handle.
pub struct ZcDataset(CountDataset);

/// Opaque fit handle.
pub struct ZcFit(FitResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> ZcStatus {
    match err {
        Error::Domain(_) => ZcStatus::Domain,
        Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => ZcStatus::Parse,
        Error::Usage(_) => ZcStatus::Usage,
        Error::EmptyDataset => ZcStatus::EmptyDataset,
        Error::Io(_) => ZcStatus::Io,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), ZcStatus>) -> ZcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal error: panic in zicount".into());
            ZcStatus::Internal
        }
    }
}

fn fail(err: Error) -> ZcStatus {
    let status = status_of(&err);
    set_last_error(err.to_string());
    status
}

fn null(what: &str) -> ZcStatus {
    set_last_error(format!("{what} is null"));
    ZcStatus::NullPointer
}

fn family_of(f: ZcFamily) -> Family {
    match f {
        ZcFamily::Dln => Family::DiscretisedLognormal,
        ZcFamily::Hooked => Family::HookedPowerLaw,
    }
}

fn model_of(m: &ZcModel) -> Result<ZeroInflatedModel, ZcStatus> {
    let base = FamilyParams::from_pair(family_of(m.family), m.first, m.second).map_err(fail)?;
    ZeroInflatedModel::with_probability(base, m.p).map_err(fail)
}

fn zc_model(model: &ZeroInflatedModel) -> ZcModel {
    let (first, second) = model.base().pair();
    let family = match model.family() {
        Family::DiscretisedLognormal => ZcFamily::Dln,
        Family::HookedPowerLaw => ZcFamily::Hooked,
    };
    ZcModel { family, first, second, p: model.p() }
}

fn write_string(out: *mut *mut c_char, s: String) -> Result<(), ZcStatus> {
    let c = CString::new(s).map_err(|_| {
        set_last_error("string contains an interior NUL".into());
        ZcStatus::Internal
    })?;
    // SAFETY: callers check `out` is non-null before computing the string.
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn zc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a dataset from `len` raw counts (shifted by +1 internally).
///
/// # Safety
/// `counts` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_dataset_from_counts(counts: *const u64, len: usize, out: *mut *mut ZcDataset) -> ZcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if counts.is_null() && len > 0 {
            return Err(null("counts"));
        }
        let raw = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(counts, len).to_vec() };
        let data = RawCounts::new(raw).shift().map_err(fail)?;
        *out = Box::into_raw(Box::new(ZcDataset(data)));
        Ok(())
    })
}

/// Loads a dataset from a file: one raw count per line, or CSV when `csv` is true.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_dataset_load(path: *const c_char, csv: bool, out: *mut *mut ZcDataset) -> ZcStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| {
            set_last_error("path is not valid UTF-8".into());
            ZcStatus::Usage
        })?;
        let format = if csv { InputFormat::Csv } else { InputFormat::Plain };
        let data = CountDataset::load(path, format).map_err(fail)?;
        *out = Box::into_raw(Box::new(ZcDataset(data)));
        Ok(())
    })
}

/// Frees a dataset. Null is ignored.
///
/// # Safety
/// `data` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zc_dataset_free(data: *mut ZcDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Number of articles, and how many of them are uncited (shifted value 1).
///
/// # Safety
/// `data` must be a live dataset; the out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn zc_dataset_size(data: *const ZcDataset, n_total: *mut u64, ones: *mut u64) -> ZcStatus {
    guard(|| {
        let data = data.as_ref().ok_or_else(|| null("data"))?;
        if let Some(n) = n_total.as_mut() {
            *n = data.0.n_total();
        }
        if let Some(r) = ones.as_mut() {
            *r = data.0.ones();
        }
        Ok(())
    })
}

/// Probability mass at shifted count `n` (n >= 1).
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn zc_pmf(model: *const ZcModel, n: u64, out: *mut f64) -> ZcStatus {
    guard(|| {
        let model = model_of(model.as_ref().ok_or_else(|| null("model"))?)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = zi_pmf(n, &model).map_err(fail)?;
        Ok(())
    })
}

/// Cumulative probability P(X <= n) at shifted count `n` (n >= 1).
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn zc_cdf(model: *const ZcModel, n: u64, out: *mut f64) -> ZcStatus {
    guard(|| {
        let model = model_of(model.as_ref().ok_or_else(|| null("model"))?)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = zi_cdf(n, &model).map_err(fail)?;
        Ok(())
    })
}

/// Draws `n` shifted counts from `model` with the given seed.
///
/// # Safety
/// `model` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_sample(model: *const ZcModel, n: u64, seed: u64, out: *mut *mut ZcDataset) -> ZcStatus {
    guard(|| {
        let model = model_of(model.as_ref().ok_or_else(|| null("model"))?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let data = sample(&SyntheticSpec::new(model, n, seed)).map_err(fail)?;
        *out = Box::into_raw(Box::new(ZcDataset(data)));
        Ok(())
    })
}

fn search_config(stride: u64, refine: bool) -> Result<SearchConfig, ZcStatus> {
    let config = SearchConfig { stride, refine, ..SearchConfig::default() };
    config.validate().map_err(fail)?;
    Ok(config)
}

/// Fits one model. With `zero_inflated`, the k-scan visits every `stride`-th
/// k (1 for all of them), refined around the best when `refine` is set.
///
/// # Safety
/// `data` must be a live dataset; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_fit(
    data: *const ZcDataset,
    family: ZcFamily,
    zero_inflated: bool,
    stride: u64,
    refine: bool,
    out: *mut *mut ZcFit,
) -> ZcStatus {
    guard(|| {
        let data = data.as_ref().ok_or_else(|| null("data"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let family = family_of(family);
        let fit = if zero_inflated {
            fit_zero_inflated(&data.0, family, &search_config(stride, refine)?)
        } else {
            fit_base(&data.0, family)
        }
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(ZcFit(fit)));
        Ok(())
    })
}

/// Frees a fit. Null is ignored.
///
/// # Safety
/// `fit` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zc_fit_free(fit: *mut ZcFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Copies the fit's numbers into `out`.
///
/// # Safety
/// `fit` must be a live fit; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zc_fit_summary(fit: *const ZcFit, out: *mut ZcFitSummary) -> ZcStatus {
    guard(|| {
        let fit = &fit.as_ref().ok_or_else(|| null("fit"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ZcFitSummary {
            params: zc_model(&fit.model),
            zero_inflated: fit.zero_inflated,
            k: fit.model.k(),
            n_total: fit.n_total,
            r: fit.r,
            loglik: fit.loglik,
            aic: fit.aic,
            ks: fit.ks,
            converged: fit.converged,
            evaluations: fit.evaluations,
        };
        Ok(())
    })
}

/// The fit as a JSON record, in the same schema the command-line tool writes.
///
/// # Safety
/// `fit` must be a live fit; `out` must be writable. Free the string with
/// [`zc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn zc_fit_json(fit: *const ZcFit, out: *mut *mut c_char) -> ZcStatus {
    guard(|| {
        let fit = &fit.as_ref().ok_or_else(|| null("fit"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        write_string(out, to_json(&FitRecord::from(fit)).map_err(fail)?)
    })
}

/// Fits all four models and writes the comparison as JSON.
///
/// # Safety
/// `data` must be a live dataset; `out` must be writable. Free the string
/// with [`zc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn zc_compare_json(
    data: *const ZcDataset,
    stride: u64,
    refine: bool,
    out: *mut *mut c_char,
) -> ZcStatus {
    guard(|| {
        let data = data.as_ref().ok_or_else(|| null("data"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let comparison = fit_all_models(&data.0, &search_config(stride, refine)?).map_err(fail)?;
        write_string(out, to_json(&ComparisonRecord::from(&comparison)).map_err(fail)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::EmptyDataset), ZcStatus::EmptyDataset);
        assert_eq!(status_of(&Error::Usage("x".into())), ZcStatus::Usage);
    }

    #[test]
    fn panics_become_internal() {
        assert_eq!(guard(|| panic!("boom")), ZcStatus::Internal);
        let msg = unsafe { CStr::from_ptr(zc_last_error()) };
        assert!(msg.to_str().unwrap().contains("panic"));
    }

    #[test]
    fn null_out_pointer_is_rejected() {
        let model = ZcModel { family: ZcFamily::Dln, first: 0.0, second: 1.0, p: 0.0 };
        assert_eq!(unsafe { zc_pmf(&model, 1, ptr::null_mut()) }, ZcStatus::NullPointer);
    }
}
