//! C ABI over the `stumpscore` estimator.
//!
//! Every function returns an [`SsStatus`]. On failure, [`ss_last_error`]
//! gives a message of the form `<stage>: <text>` for the calling thread.
//! Strings handed out by this library must be released with
//! [`ss_string_free`]; estimators with [`ss_estimator_free`].
//!
//! A handle may not be used from several threads while it is being fitted.
//! A fitted handle is read-only for predict, print and serialization.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use stumpscore::data::parse_thresholds;
use stumpscore::{Dataset, Error, Estimator, Features, FitConfig, Model, Objective, Outcome, Thresholds};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    FitError = 4,
    NotFitted = 5,
    Io = 6,
    ModelError = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsObjective {
    /// Continuous outcome, squared error.
    Regression = 0,
    /// 0/1 outcome, logistic loss.
    Binary = 1,
    /// Time-to-event outcome, pairwise ranking loss.
    Survival = 2,
}

/// Estimator constructor parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SsParams {
    pub objective: SsObjective,
    pub n_iter: usize,
    pub learning_rate: f64,
    pub n_quantiles: usize,
    pub subsample: f64,
    pub seed: u64,
}

/// Opaque estimator handle.
pub struct SsEstimator {
    inner: Estimator,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn status_of(error: &Error) -> SsStatus {
    use stumpscore::Stage;
    match error {
        Error::NotFitted => SsStatus::NotFitted,
        Error::Io { .. } => SsStatus::Io,
        Error::Internal(_) => SsStatus::Internal,
        _ => match error.stage() {
            Stage::Load | Stage::Schema | Stage::Thresholds | Stage::Predict => SsStatus::DataError,
            Stage::Config => SsStatus::InvalidArgument,
            Stage::Fit | Stage::Eval => SsStatus::FitError,
            Stage::Model => SsStatus::ModelError,
            Stage::Internal => SsStatus::Internal,
        },
    }
}

struct Failure(SsStatus, String);

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure(status_of(&error), format!("{}: {error}", error.stage()))
    }
}

fn null(what: &str) -> Failure {
    Failure(SsStatus::NullPointer, format!("argument: {what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(SsStatus::InvalidArgument, format!("argument: {}", message.into()))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal: panic inside stumpscore".into());
            SsStatus::Internal
        }
    }
}

unsafe fn handle<'a>(h: *const SsEstimator) -> Result<&'a SsEstimator, Failure> {
    h.as_ref().ok_or_else(|| null("estimator"))
}

unsafe fn handle_mut<'a>(h: *mut SsEstimator) -> Result<&'a mut SsEstimator, Failure> {
    h.as_mut().ok_or_else(|| null("estimator"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn slice_of<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let text =
        CString::new(text).map_err(|_| Failure(SsStatus::Internal, "internal: NUL in output".into()))?;
    *out = text.into_raw();
    Ok(())
}

fn objective_of(objective: SsObjective) -> Objective {
    match objective {
        SsObjective::Regression => Objective::SquaredError,
        SsObjective::Binary => Objective::Logistic,
        SsObjective::Survival => Objective::SurvivalRank,
    }
}

fn objective_to_c(objective: Objective) -> SsObjective {
    match objective {
        Objective::SquaredError => SsObjective::Regression,
        Objective::Logistic => SsObjective::Binary,
        Objective::SurvivalRank => SsObjective::Survival,
    }
}

unsafe fn feature_table(
    x: *const f64,
    n_rows: usize,
    n_cols: usize,
    names: *const *const c_char,
) -> Result<Features, Failure> {
    let len = n_rows
        .checked_mul(n_cols)
        .ok_or_else(|| invalid("n_rows * n_cols overflows"))?;
    let values = slice_of(x, len, "x")?;
    let names = if names.is_null() {
        (0..n_cols).map(|j| format!("x{j}")).collect()
    } else {
        let ptrs = slice::from_raw_parts(names, n_cols);
        let mut out = Vec::with_capacity(n_cols);
        for &p in ptrs {
            out.push(c_str(p, "feature name")?.to_owned());
        }
        out
    };
    Ok(Features::from_row_major(names, values, n_rows)?)
}

unsafe fn outcome(
    objective: Objective,
    y: *const f64,
    events: *const u8,
    n_rows: usize,
) -> Result<Outcome, Failure> {
    let y = slice_of(y, n_rows, "y")?;
    match objective {
        Objective::SquaredError => Ok(Outcome::Continuous(y.to_vec())),
        Objective::Logistic => {
            let mut labels = Vec::with_capacity(n_rows);
            for (i, &v) in y.iter().enumerate() {
                if v != 0.0 && v != 1.0 {
                    return Err(invalid(format!("y[{i}] = {v} is not a 0/1 label")));
                }
                labels.push(v == 1.0);
            }
            Ok(Outcome::Binary(labels))
        }
        Objective::SurvivalRank => {
            if events.is_null() {
                return Err(null("events (required for the survival objective)"));
            }
            let events = slice_of(events, n_rows, "events")?;
            let mut flags = Vec::with_capacity(n_rows);
            for (i, &e) in events.iter().enumerate() {
                flags.push(match e {
                    0 => false,
                    1 => true,
                    _ => return Err(invalid(format!("events[{i}] = {e} is not 0 or 1"))),
                });
            }
            Ok(Outcome::Survival {
                times: y.to_vec(),
                events: flags,
            })
        }
    }
}

/// Library defaults for `objective`.
#[no_mangle]
pub extern "C" fn ss_params_default(objective: SsObjective) -> SsParams {
    let config = FitConfig::default();
    SsParams {
        objective,
        n_iter: config.n_iter,
        learning_rate: config.learning_rate,
        n_quantiles: config.n_quantiles,
        subsample: config.subsample,
        seed: config.seed,
    }
}

/// Message for the last failed call on this thread. Owned by the library and
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates an unfitted estimator. `params` may be null for regression
/// defaults.
///
/// # Safety
/// `params` must be null or point to a valid `SsParams`; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_new(params: *const SsParams, out: *mut *mut SsEstimator) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params
            .as_ref()
            .copied()
            .unwrap_or_else(|| ss_params_default(SsObjective::Regression));
        let config = FitConfig {
            n_iter: p.n_iter,
            learning_rate: p.learning_rate,
            n_quantiles: p.n_quantiles,
            subsample: p.subsample,
            seed: p.seed,
        };
        config.validate()?;
        let estimator = SsEstimator {
            inner: Estimator::new(objective_of(p.objective), config),
        };
        *out = Box::into_raw(Box::new(estimator));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_free(h: *mut SsEstimator) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Replaces quantile cutoffs with user cutoffs in thresholds-file syntax
/// (`name: v1, v2` per line). Features not listed are excluded unless
/// `merge_quantiles` is nonzero. A null `text` restores quantile cutoffs.
///
/// # Safety
/// `h` must be a live handle; `text` null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_set_thresholds(
    h: *mut SsEstimator,
    text: *const c_char,
    merge_quantiles: i32,
) -> SsStatus {
    guard(|| {
        let h = handle_mut(h)?;
        h.inner.thresholds = if text.is_null() {
            Thresholds::Quantiles
        } else {
            Thresholds::User {
                cutoffs: parse_thresholds(c_str(text, "text")?)?,
                merge_quantiles: merge_quantiles != 0,
            }
        };
        Ok(())
    })
}

/// Fits on a row-major `n_rows` x `n_cols` table. `names` holds `n_cols`
/// feature names or is null (names become `x0`, `x1`, ...). `y` holds the
/// target, 0/1 labels, or survival times; `events` holds 0/1 event flags and
/// is only read for the survival objective.
///
/// # Safety
/// Pointers must reference arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_fit(
    h: *mut SsEstimator,
    x: *const f64,
    n_rows: usize,
    n_cols: usize,
    names: *const *const c_char,
    y: *const f64,
    events: *const u8,
) -> SsStatus {
    guard(|| {
        let h = handle_mut(h)?;
        let features = feature_table(x, n_rows, n_cols, names)?;
        let outcome = outcome(h.inner.objective, y, events, n_rows)?;
        let dataset = Dataset::new(features, outcome)?;
        h.inner.fit(&dataset)?;
        Ok(())
    })
}

/// Raw scores for a row-major table with the training columns in training
/// order. `out` must hold `n_rows` values.
///
/// # Safety
/// `x` must hold `n_rows * n_cols` values and `out` `n_rows`.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_predict(
    h: *const SsEstimator,
    x: *const f64,
    n_rows: usize,
    n_cols: usize,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let h = handle(h)?;
        let model = h.inner.model()?;
        if n_cols != model.card.features.len() {
            return Err(invalid(format!(
                "model has {} features, got {n_cols} columns",
                model.card.features.len()
            )));
        }
        if out.is_null() && n_rows > 0 {
            return Err(null("out"));
        }
        let len = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| invalid("n_rows * n_cols overflows"))?;
        let values = slice_of(x, len, "x")?;
        let features = Features::from_row_major(model.card.features.clone(), values, n_rows)?;
        let scores = h.inner.predict(&features)?;
        if n_rows > 0 {
            slice::from_raw_parts_mut(out, n_rows).copy_from_slice(&scores);
        }
        Ok(())
    })
}

/// Renders the score card with `decimals` digits into a new string.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_print(
    h: *const SsEstimator,
    decimals: usize,
    out: *mut *mut c_char,
) -> SsStatus {
    guard(|| {
        let text = handle(h)?.inner.print(decimals)?;
        write_string(out, text)
    })
}

/// Model file contents as a new string.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_to_json(h: *const SsEstimator, out: *mut *mut c_char) -> SsStatus {
    guard(|| {
        let text = handle(h)?.inner.model()?.to_json()?;
        write_string(out, text)
    })
}

/// # Safety
/// `h` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_save(h: *const SsEstimator, path: *const c_char) -> SsStatus {
    guard(|| {
        let h = handle(h)?;
        let path = c_str(path, "path")?;
        h.inner.model()?.save(path)?;
        Ok(())
    })
}

/// Creates a fitted estimator from a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_load(path: *const c_char, out: *mut *mut SsEstimator) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = Model::load(c_str(path, "path")?)?;
        *out = Box::into_raw(Box::new(SsEstimator {
            inner: Estimator::from_model(model),
        }));
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_is_fitted(h: *const SsEstimator, out: *mut i32) -> SsStatus {
    guard(|| {
        let h = handle(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = i32::from(h.inner.is_fitted());
        Ok(())
    })
}

/// Number of retained cutoffs across all variables.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_rule_count(h: *const SsEstimator, out: *mut usize) -> SsStatus {
    guard(|| {
        let h = handle(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = h.inner.model()?.card.count_rules();
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_estimator_objective(h: *const SsEstimator, out: *mut SsObjective) -> SsStatus {
    guard(|| {
        let h = handle(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = objective_to_c(h.inner.objective);
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
