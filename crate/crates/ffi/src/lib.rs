//! C ABI over the asota toolkit.
//!
//! Every fallible function returns an [`AsotaStatus`]; on failure the message
//! is available from [`asota_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use asota::factors::{accumulate_capital, implicit_depreciation};
use asota::index::{compute_indices, finalize_asota, AsotaSeries, BestMode, IndexOptions, IndexSet, Variant};
use asota::ingest::{parse_records, BenchmarkCorpus, IngestOptions, OrientationTable};
use asota::production::{doubling_time, fit_mean_log_a};
use asota::scaling::{
    effective_alpha, fit_joint_loss, fit_power_law, optimal_allocation, JointFitOptions, JointLossFit,
};
use asota::series::{AnnualSeries, Units};
use chrono::NaiveDate;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsotaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    NumericError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsotaVariant {
    Count = 0,
    Ew = 1,
    Aw = 2,
    Ewe = 3,
    Awe = 4,
    Ewr = 5,
    Awr = 6,
}

impl From<AsotaVariant> for Variant {
    fn from(v: AsotaVariant) -> Self {
        match v {
            AsotaVariant::Count => Variant::N,
            AsotaVariant::Ew => Variant::Ew,
            AsotaVariant::Aw => Variant::Aw,
            AsotaVariant::Ewe => Variant::Ewe,
            AsotaVariant::Awe => Variant::Awe,
            AsotaVariant::Ewr => Variant::Ewr,
            AsotaVariant::Awr => Variant::Awr,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AsotaCorpusCounts {
    pub total_combos: usize,
    pub combos_with_entries: usize,
    pub combos_with_10_plus: usize,
    pub rejected_lines: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AsotaPowerFit {
    pub alpha_prime: f64,
    pub prefactor: f64,
    pub residual_norm: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AsotaJointFit {
    pub l_min: f64,
    pub b: f64,
    pub beta: f64,
    pub g: f64,
    pub gamma: f64,
    pub residual_norm: f64,
    pub converged: bool,
}

impl From<&JointLossFit> for AsotaJointFit {
    fn from(f: &JointLossFit) -> Self {
        Self {
            l_min: f.l_min,
            b: f.b,
            beta: f.beta,
            g: f.g,
            gamma: f.gamma,
            residual_norm: f.residual_norm,
            converged: f.converged,
        }
    }
}

impl From<&AsotaJointFit> for JointLossFit {
    fn from(f: &AsotaJointFit) -> Self {
        Self {
            l_min: f.l_min,
            b: f.b,
            beta: f.beta,
            g: f.g,
            gamma: f.gamma,
            residual_norm: f.residual_norm,
            converged: f.converged,
            iterations: 0,
        }
    }
}

/// Parsed benchmark corpus.
pub struct AsotaCorpus {
    inner: BenchmarkCorpus,
}

/// Daily index variants plus the standardized series when it is defined.
pub struct AsotaIndex {
    set: IndexSet,
    asota: Option<AsotaSeries>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(AsotaStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(AsotaStatus::NullPointer, format!("{what} is null"))
    }
    fn arg(msg: impl Into<String>) -> Self {
        Failure(AsotaStatus::InvalidArgument, msg.into())
    }
    fn data(e: impl std::fmt::Display) -> Self {
        Failure(AsotaStatus::DataError, e.to_string())
    }
    fn numeric(e: impl std::fmt::Display) -> Self {
        Failure(AsotaStatus::NumericError, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AsotaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AsotaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AsotaStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn output<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts_mut(p, n))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::arg(format!("{what} is not valid UTF-8")))
}

/// Series over consecutive years starting at 0; the year labels are irrelevant to callers.
fn consecutive(values: &[f64], units: Units) -> Result<AnnualSeries, Failure> {
    AnnualSeries::from_pairs(units, values.iter().enumerate().map(|(i, &v)| (i as i32, v)))
        .map_err(|e| Failure::arg(e.to_string()))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn asota_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Output doubling time in years. Pass `INFINITY` for a factor that stays constant.
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn asota_doubling_time(alpha: f64, k_years: f64, l_years: f64, out: *mut f64) -> AsotaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let opt = |d: f64| (!d.is_infinite()).then_some(d);
        *out = doubling_time(alpha, opt(k_years), opt(l_years)).map_err(Failure::numeric)?;
        Ok(())
    })
}

/// Implicit depreciation from consecutive-year stock and investment arrays.
/// `out[0]` is NaN; `out[i]` is the rate for year `i`.
///
/// # Safety
/// Each pointer must reference `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn asota_implicit_depreciation(
    net_stock: *const f64,
    investment: *const f64,
    n: usize,
    out: *mut f64,
) -> AsotaStatus {
    guard(|| {
        let k = consecutive(input(net_stock, n, "net_stock")?, Units::UsdNominal)?;
        let i = consecutive(input(investment, n, "investment")?, Units::UsdNominal)?;
        let out = output(out, n, "out")?;
        let delta = implicit_depreciation(&k, &i).map_err(Failure::data)?;
        for (year, slot) in out.iter_mut().enumerate() {
            *slot = delta.get(year as i32).unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Perpetual-inventory stock with `out[0] = k0` and `out[i]` built from
/// `investment[i]` and `delta[i]` for `i >= 1`.
///
/// # Safety
/// Each pointer must reference `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn asota_accumulate_capital(
    investment: *const f64,
    delta: *const f64,
    n: usize,
    k0: f64,
    out: *mut f64,
) -> AsotaStatus {
    guard(|| {
        if n == 0 {
            return Err(Failure::arg("n must be at least 1"));
        }
        let i = consecutive(input(investment, n, "investment")?, Units::FlopPerSec)?;
        let d = consecutive(input(delta, n, "delta")?, Units::Ratio)?;
        let out = output(out, n, "out")?;
        let k = accumulate_capital(&i, &d, k0, 0).map_err(Failure::numeric)?;
        for (year, slot) in out.iter_mut().enumerate() {
            *slot = k.get(year as i32).unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Fits the mean log productivity on aligned log series.
///
/// # Safety
/// Input pointers must reference `n` doubles; outputs one double each.
#[no_mangle]
pub unsafe extern "C" fn asota_fit_mean_log_a(
    log_y: *const f64,
    log_k: *const f64,
    log_l: *const f64,
    n: usize,
    alpha: f64,
    out_mean_log_a: *mut f64,
    out_r2: *mut f64,
) -> AsotaStatus {
    guard(|| {
        let y = consecutive(input(log_y, n, "log_y")?, Units::Log)?;
        let k = consecutive(input(log_k, n, "log_k")?, Units::Log)?;
        let l = consecutive(input(log_l, n, "log_l")?, Units::Log)?;
        let mean = out_ref(out_mean_log_a, "out_mean_log_a")?;
        let r2 = out_ref(out_r2, "out_r2")?;
        let fit = fit_mean_log_a(&y, &k, &l, alpha).map_err(Failure::numeric)?;
        *mean = fit.mean_log_a;
        *r2 = fit.r2;
        Ok(())
    })
}

/// Log-log fit of `Y = a * C^alpha'`.
///
/// # Safety
/// `c` and `y` must reference `n` doubles; `out` one struct.
#[no_mangle]
pub unsafe extern "C" fn asota_fit_power_law(
    c: *const f64,
    y: *const f64,
    n: usize,
    out: *mut AsotaPowerFit,
) -> AsotaStatus {
    guard(|| {
        let c = input(c, n, "c")?;
        let y = input(y, n, "y")?;
        let out = out_ref(out, "out")?;
        let samples: Vec<(f64, f64)> = c.iter().copied().zip(y.iter().copied()).collect();
        let fit = fit_power_law(&samples).map_err(Failure::data)?;
        *out = AsotaPowerFit {
            alpha_prime: fit.alpha_prime,
            prefactor: fit.prefactor,
            residual_norm: fit.residual_norm,
        };
        Ok(())
    })
}

/// Fits `L = L_min + B / D^beta + G / P^gamma`.
///
/// # Safety
/// `d`, `p`, `l` must reference `n` doubles; `out` one struct.
#[no_mangle]
pub unsafe extern "C" fn asota_fit_joint_loss(
    d: *const f64,
    p: *const f64,
    l: *const f64,
    n: usize,
    out: *mut AsotaJointFit,
) -> AsotaStatus {
    guard(|| {
        let (d, p, l) = (input(d, n, "d")?, input(p, n, "p")?, input(l, n, "l")?);
        let out = out_ref(out, "out")?;
        let samples: Vec<(f64, f64, f64)> = (0..n).map(|i| (d[i], p[i], l[i])).collect();
        let fit = fit_joint_loss(&samples, &JointFitOptions::default()).map_err(Failure::data)?;
        *out = AsotaJointFit::from(&fit);
        Ok(())
    })
}

/// Compute-optimal dataset size and parameter count for compute `c` and pass factor `t`.
///
/// # Safety
/// `fit` must point to a valid struct; outputs one double each.
#[no_mangle]
pub unsafe extern "C" fn asota_optimal_allocation(
    fit: *const AsotaJointFit,
    c: f64,
    t: f64,
    out_d: *mut f64,
    out_p: *mut f64,
) -> AsotaStatus {
    guard(|| {
        let fit = JointLossFit::from(fit.as_ref().ok_or_else(|| Failure::null("fit"))?);
        let out_d = out_ref(out_d, "out_d")?;
        let out_p = out_ref(out_p, "out_p")?;
        let (d, p) = optimal_allocation(&fit, c, t).map_err(Failure::numeric)?;
        *out_d = d;
        *out_p = p;
        Ok(())
    })
}

/// Compute exponent implied by nearly equal loss exponents.
///
/// # Safety
/// `fit` must point to a valid struct; `out` one double.
#[no_mangle]
pub unsafe extern "C" fn asota_effective_alpha(
    fit: *const AsotaJointFit,
    tolerance: f64,
    out: *mut f64,
) -> AsotaStatus {
    guard(|| {
        let fit = JointLossFit::from(fit.as_ref().ok_or_else(|| Failure::null("fit"))?);
        let out = out_ref(out, "out")?;
        *out = effective_alpha(&fit, tolerance).map_err(Failure::numeric)?;
        Ok(())
    })
}

/// Parses CSV or JSON-lines records with an orientation table (`metric_name,kind` CSV).
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn asota_corpus_parse(
    records: *const c_char,
    orientation: *const c_char,
    out: *mut *mut AsotaCorpus,
) -> AsotaStatus {
    guard(|| {
        let records = text(records, "records")?;
        let orientation = text(orientation, "orientation")?;
        let out = out_ref(out, "out")?;
        let table = OrientationTable::read_csv(orientation.as_bytes()).map_err(Failure::data)?;
        let inner = parse_records(records.as_bytes(), &table, IngestOptions::default()).map_err(Failure::data)?;
        *out = Box::into_raw(Box::new(AsotaCorpus { inner }));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be a live handle; `out` one struct.
#[no_mangle]
pub unsafe extern "C" fn asota_corpus_counts(corpus: *const AsotaCorpus, out: *mut AsotaCorpusCounts) -> AsotaStatus {
    guard(|| {
        let c = &corpus.as_ref().ok_or_else(|| Failure::null("corpus"))?.inner;
        *out_ref(out, "out")? = AsotaCorpusCounts {
            total_combos: c.counts.total_combos,
            combos_with_entries: c.counts.combos_with_entries,
            combos_with_10_plus: c.counts.combos_with_10_plus,
            rejected_lines: c.rejections.len(),
        };
        Ok(())
    })
}

/// # Safety
/// `corpus` must be null or a handle from [`asota_corpus_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn asota_corpus_free(corpus: *mut AsotaCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Runs the daily index engine over a corpus.
///
/// # Safety
/// `corpus` must be a live handle; `out` writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn asota_index_compute(
    corpus: *const AsotaCorpus,
    strict_formula: bool,
    out: *mut *mut AsotaIndex,
) -> AsotaStatus {
    guard(|| {
        let c = &corpus.as_ref().ok_or_else(|| Failure::null("corpus"))?.inner;
        let out = out_ref(out, "out")?;
        let opts = IndexOptions {
            best_mode: if strict_formula {
                BestMode::StrictFormula
            } else {
                BestMode::StateOfTheArt
            },
            ..IndexOptions::default()
        };
        let set = compute_indices(c, opts).map_err(Failure::numeric)?;
        let asota = finalize_asota(set.get(Variant::Awr), set.get(Variant::N)).ok();
        *out = Box::into_raw(Box::new(AsotaIndex { set, asota }));
        Ok(())
    })
}

/// Number of days on the index grid.
///
/// # Safety
/// `index` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn asota_index_len(index: *const AsotaIndex) -> usize {
    index.as_ref().map_or(0, |h| h.set.get(Variant::N).values.len())
}

/// First grid day as days since 1970-01-01.
///
/// # Safety
/// `index` must be a live handle; `out` one value.
#[no_mangle]
pub unsafe extern "C" fn asota_index_start(index: *const AsotaIndex, out: *mut i64) -> AsotaStatus {
    guard(|| {
        let h = index.as_ref().ok_or_else(|| Failure::null("index"))?;
        *out_ref(out, "out")? = days_since_epoch(h.set.get(Variant::N).start);
        Ok(())
    })
}

fn days_since_epoch(d: NaiveDate) -> i64 {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date");
    d.signed_duration_since(epoch).num_days()
}

fn copy_out(values: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if len < values.len() {
        return Err(Failure(
            AsotaStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", values.len()),
        ));
    }
    // SAFETY: caller guarantees `out` holds `len >= values.len()` doubles.
    let out = unsafe { output(out, values.len(), "out")? };
    out.copy_from_slice(values);
    Ok(())
}

/// Copies one variant's daily series into `out`, which must hold [`asota_index_len`] values.
///
/// # Safety
/// `index` must be a live handle; `out` must reference `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn asota_index_values(
    index: *const AsotaIndex,
    variant: AsotaVariant,
    out: *mut f64,
    len: usize,
) -> AsotaStatus {
    guard(|| {
        let h = index.as_ref().ok_or_else(|| Failure::null("index"))?;
        copy_out(&h.set.get(variant.into()).values, out, len)
    })
}

/// Copies the standardized log index; fails with `NUMERIC_ERROR` when the
/// normalization is undefined. `out_base` receives the base day (days since 1970-01-01).
///
/// # Safety
/// `index` must be a live handle; `out` must reference `len` doubles; `out_base` one value.
#[no_mangle]
pub unsafe extern "C" fn asota_index_asota(
    index: *const AsotaIndex,
    out: *mut f64,
    len: usize,
    out_base: *mut i64,
) -> AsotaStatus {
    guard(|| {
        let h = index.as_ref().ok_or_else(|| Failure::null("index"))?;
        let base = out_ref(out_base, "out_base")?;
        let a = h
            .asota
            .as_ref()
            .ok_or_else(|| Failure::numeric("normalization undefined for this corpus"))?;
        copy_out(&a.values, out, len)?;
        *base = days_since_epoch(a.base_date);
        Ok(())
    })
}

/// # Safety
/// `index` must be null or a handle from [`asota_index_compute`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn asota_index_free(index: *mut AsotaIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}
