//! C ABI for the [`fedheart`] pipeline.
//!
//! The surface is deliberately small: load a dataset directory into an
//! opaque handle, then ask for centralized accuracy, federated accuracy,
//! Shapley attributions, or a fully rendered experiment report. Every
//! fallible function returns a status code (`FEDHEART_OK` on success) and
//! records a human-readable message retrievable on the same thread via
//! [`fedheart_last_error_message`]. Out-parameters are written only on
//! success.
//!
//! Strings returned by this library are heap-allocated copies; release
//! them with [`fedheart_string_free`]. Dataset handles are released with
//! [`fedheart_dataset_free`]. The numeric status codes 1/2/3 match the
//! `bench` binary's exit codes for the same failure classes.

#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::ptr;

use fedheart::bench::{self, FeatureSet, ReportFormat, RunConfig};
use fedheart::dataset::TabularDataset;
use fedheart::federation::{run_federated, FedConfig, Strategy};
use fedheart::models::{centralized_accuracy, Family, Hyperparams};
use fedheart::Error;

/// Operation completed.
pub const FEDHEART_OK: u32 = 0;
/// Invalid argument value or misuse of an operation contract.
pub const FEDHEART_ERR_USAGE: u32 = 1;
/// Missing, unreadable or malformed data files.
pub const FEDHEART_ERR_DATA: u32 = 2;
/// Numeric breakdown: singular system, non-finite loss, and the like.
pub const FEDHEART_ERR_NUMERIC: u32 = 3;
/// A required pointer argument was null.
pub const FEDHEART_ERR_NULL_POINTER: u32 = 4;
/// A string argument was not valid UTF-8.
pub const FEDHEART_ERR_ENCODING: u32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

/// Opaque handle to a loaded, preprocessed dataset. Only ever passed by
/// pointer across the ABI; create with [`fedheart_dataset_load`] and
/// release with [`fedheart_dataset_free`].
pub struct FedheartDataset {
    inner: TabularDataset,
}

fn record_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    let cstring = CString::new(sanitized).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

/// Record `err`'s message and translate its class into a status code.
fn fail(err: &Error) -> u32 {
    record_error(&err.to_string());
    u32::from(err.exit_code())
}

fn fail_with(code: u32, msg: &str) -> u32 {
    record_error(msg);
    code
}

/// Borrow a required C string argument, reporting null or bad encoding.
fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, u32> {
    if ptr.is_null() {
        return Err(fail_with(
            FEDHEART_ERR_NULL_POINTER,
            &format!("{what} must not be null"),
        ));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| fail_with(FEDHEART_ERR_ENCODING, &format!("{what} must be valid UTF-8")))
}

/// Borrow an optional C string argument, substituting a default when null.
fn optional_str<'a>(ptr: *const c_char, default: &'a str, what: &str) -> Result<&'a str, u32> {
    if ptr.is_null() {
        Ok(default)
    } else {
        required_str(ptr, what)
    }
}

fn borrow_dataset<'a>(ds: *const FedheartDataset) -> Result<&'a TabularDataset, u32> {
    if ds.is_null() {
        return Err(fail_with(
            FEDHEART_ERR_NULL_POINTER,
            "dataset handle must not be null",
        ));
    }
    Ok(unsafe { &(*ds).inner })
}

fn require_out<T>(ptr: *mut T, what: &str) -> Result<(), u32> {
    if ptr.is_null() {
        Err(fail_with(
            FEDHEART_ERR_NULL_POINTER,
            &format!("{what} must not be null"),
        ))
    } else {
        Ok(())
    }
}

/// Hand a Rust string across the ABI as a heap-allocated C string.
fn export_string(s: String, out: *mut *mut c_char) -> u32 {
    let cstring = match CString::new(s.replace('\0', " ")) {
        Ok(c) => c,
        Err(_) => return fail_with(FEDHEART_ERR_ENCODING, "rendered string contained a NUL"),
    };
    unsafe { *out = cstring.into_raw() };
    FEDHEART_OK
}

/// Version of the underlying library, as a newly allocated string.
/// Free with [`fedheart_string_free`].
#[no_mangle]
pub extern "C" fn fedheart_version() -> *mut c_char {
    CString::new(env!("CARGO_PKG_VERSION"))
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// Copy of the message recorded by the most recent failing call on this
/// thread, or null when nothing has failed yet. Free with
/// [`fedheart_string_free`].
#[no_mangle]
pub extern "C" fn fedheart_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string allocated by this library. Null is a no-op.
#[no_mangle]
pub extern "C" fn fedheart_string_free(s: *mut c_char) {
    if s.is_null() {
        return;
    }
    unsafe { drop(CString::from_raw(s)) };
}

/// Load the four hospital files under `dir` and preprocess them into a
/// modelling table. `features` picks the column subset — `"table4"` (the
/// default when null) or `"full"` — and rows with a missing value in any
/// kept column are dropped. On success a new handle is written to `out`;
/// release it with [`fedheart_dataset_free`].
#[no_mangle]
pub extern "C" fn fedheart_dataset_load(
    dir: *const c_char,
    features: *const c_char,
    out: *mut *mut FedheartDataset,
) -> u32 {
    if let Err(code) = require_out(out, "out") {
        return code;
    }
    let dir = match required_str(dir, "dir") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let features = match optional_str(features, "table4", "features") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let feature_set = match FeatureSet::parse(features) {
        Ok(fs) => fs,
        Err(e) => return fail(&e),
    };
    match bench::load_dataset(Path::new(dir), feature_set) {
        Ok(inner) => {
            let handle = Box::new(FedheartDataset { inner });
            unsafe { *out = Box::into_raw(handle) };
            FEDHEART_OK
        }
        Err(e) => fail(&e),
    }
}

/// Release a dataset handle. Null is a no-op.
#[no_mangle]
pub extern "C" fn fedheart_dataset_free(ds: *mut FedheartDataset) {
    if ds.is_null() {
        return;
    }
    unsafe { drop(Box::from_raw(ds)) };
}

/// Row and feature counts of a loaded dataset.
#[no_mangle]
pub extern "C" fn fedheart_dataset_shape(
    ds: *const FedheartDataset,
    out_rows: *mut usize,
    out_features: *mut usize,
) -> u32 {
    let dataset = match borrow_dataset(ds) {
        Ok(d) => d,
        Err(code) => return code,
    };
    if let Err(code) = require_out(out_rows, "out_rows") {
        return code;
    }
    if let Err(code) = require_out(out_features, "out_features") {
        return code;
    }
    unsafe {
        *out_rows = dataset.n_rows();
        *out_features = dataset.n_features();
    }
    FEDHEART_OK
}

/// Fraction of positive (disease-present) labels in the dataset.
#[no_mangle]
pub extern "C" fn fedheart_dataset_prevalence(
    ds: *const FedheartDataset,
    out: *mut f64,
) -> u32 {
    let dataset = match borrow_dataset(ds) {
        Ok(d) => d,
        Err(code) => return code,
    };
    if let Err(code) = require_out(out, "out") {
        return code;
    }
    unsafe { *out = dataset.prevalence() };
    FEDHEART_OK
}

/// Name of feature column `index`, as a newly allocated string. Free with
/// [`fedheart_string_free`].
#[no_mangle]
pub extern "C" fn fedheart_dataset_feature_name(
    ds: *const FedheartDataset,
    index: usize,
    out: *mut *mut c_char,
) -> u32 {
    let dataset = match borrow_dataset(ds) {
        Ok(d) => d,
        Err(code) => return code,
    };
    if let Err(code) = require_out(out, "out") {
        return code;
    }
    let names = dataset.schema.names();
    if index >= names.len() {
        return fail_with(
            FEDHEART_ERR_USAGE,
            &format!(
                "feature index {index} out of range (dataset has {} features)",
                names.len()
            ),
        );
    }
    export_string(names[index].to_string(), out)
}

/// Train the tuned `family` model on a seeded 66/34 split of the pooled
/// data and write its held-out accuracy. `family` is one of `lr`, `nn1`,
/// `svm`, `nb`, `dt`, `rf`, `knn` (case-insensitive).
#[no_mangle]
pub extern "C" fn fedheart_centralized_accuracy(
    ds: *const FedheartDataset,
    family: *const c_char,
    seed: u64,
    out: *mut f64,
) -> u32 {
    let dataset = match borrow_dataset(ds) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let family = match required_str(family, "family") {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Err(code) = require_out(out, "out") {
        return code;
    }
    let family = match Family::parse(family) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let hp = Hyperparams::tuned(family);
    match centralized_accuracy(&hp, dataset, seed) {
        Ok(acc) => {
            unsafe { *out = acc };
            FEDHEART_OK
        }
        Err(e) => fail(&e),
    }
}

/// Run the four-client federated simulation for `rounds` rounds of
/// `local_steps` local SGD steps under `strategy` (`fedavg`, `fedadam`,
/// `fedyogi` or `scaffold`), once per seed in `seeds[0..n_seeds]`, and
/// write the mean and population standard deviation of the final
/// weighted cross-client accuracy.
#[no_mangle]
pub extern "C" fn fedheart_federated_accuracy(
    ds: *const FedheartDataset,
    family: *const c_char,
    strategy: *const c_char,
    rounds: u32,
    local_steps: u32,
    seeds: *const u64,
    n_seeds: usize,
    out_mean: *mut f64,
    out_std: *mut f64,
) -> u32 {
    let dataset = match borrow_dataset(ds) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let family = match required_str(family, "family") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let strategy = match required_str(strategy, "strategy") {
        Ok(s) => s,
        Err(code) => return code,
    };
    if seeds.is_null() {
        return fail_with(FEDHEART_ERR_NULL_POINTER, "seeds must not be null");
    }
    if n_seeds == 0 {
        return fail_with(FEDHEART_ERR_USAGE, "n_seeds must be at least 1");
    }
    if let Err(code) = require_out(out_mean, "out_mean") {
        return code;
    }
    if let Err(code) = require_out(out_std, "out_std") {
        return code;
    }
    let family = match Family::parse(family) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let strategy = match Strategy::parse(strategy) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let seeds = unsafe { std::slice::from_raw_parts(seeds, n_seeds) };
    let mut cfg = FedConfig::new(family, strategy);
    cfg.rounds = rounds as usize;
    cfg.local_steps = local_steps as usize;
    match run_federated(dataset, &cfg, seeds) {
        Ok(summary) => {
            unsafe {
                *out_mean = summary.mean;
                *out_std = summary.std;
            }
            FEDHEART_OK
        }
        Err(e) => fail(&e),
    }
}

/// Mean-absolute Shapley attribution of every feature for one tuned
/// `family` model, trained on a seeded 66/34 split and explained on the
/// held-out rows against a `background`-row reference sample.
/// `out_mean_abs` must point to `n_features` writable doubles (see
/// [`fedheart_dataset_shape`]); `out_ranks`, when non-null, receives the
/// 1-based importance rank of each feature in the same order.
#[no_mangle]
pub extern "C" fn fedheart_shap_mean_abs(
    ds: *const FedheartDataset,
    family: *const c_char,
    seed: u64,
    background: usize,
    out_mean_abs: *mut f64,
    out_ranks: *mut u32,
) -> u32 {
    let dataset = match borrow_dataset(ds) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let family = match required_str(family, "family") {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Err(code) = require_out(out_mean_abs, "out_mean_abs") {
        return code;
    }
    let family = match Family::parse(family) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let report = match bench::shap_report_for(dataset, family, seed, background) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    unsafe {
        ptr::copy_nonoverlapping(
            report.mean_abs.as_ptr(),
            out_mean_abs,
            report.mean_abs.len(),
        );
        if !out_ranks.is_null() {
            for (i, &rank) in report.ranks.iter().enumerate() {
                *out_ranks.add(i) = rank as u32;
            }
        }
    }
    FEDHEART_OK
}

/// One-shot experiment runner mirroring the `bench` binary: load the data
/// under `data_dir`, run `experiment` (`centralized`, `federated`,
/// `local-baseline`, `shap` or `grid-search`) with that experiment's
/// default model families, and write the rendered report to `out_report`
/// as a newly allocated string. `seeds` accepts `"a..b"` or a comma list
/// (null → `"0..9"`); `features` and `format` default to `"table4"` and
/// `"markdown"` when null. Free the report with [`fedheart_string_free`].
#[no_mangle]
pub extern "C" fn fedheart_bench_render(
    data_dir: *const c_char,
    experiment: *const c_char,
    seeds: *const c_char,
    rounds: u32,
    local_steps: u32,
    features: *const c_char,
    format: *const c_char,
    out_report: *mut *mut c_char,
) -> u32 {
    if let Err(code) = require_out(out_report, "out_report") {
        return code;
    }
    let data_dir = match required_str(data_dir, "data_dir") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let experiment = match required_str(experiment, "experiment") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let seeds = match optional_str(seeds, "0..9", "seeds") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let features = match optional_str(features, "table4", "features") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let format = match optional_str(format, "markdown", "format") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = (|| -> fedheart::Result<(bench::BenchReport, ReportFormat)> {
        let experiment = bench::Experiment::parse(experiment)?;
        let mut cfg = RunConfig::new(experiment, Path::new(data_dir).to_path_buf());
        cfg.seeds = bench::parse_seeds(seeds)?;
        cfg.rounds = rounds as usize;
        cfg.local_steps = local_steps as usize;
        cfg.features = FeatureSet::parse(features)?;
        let format = ReportFormat::parse(format)?;
        cfg.format = format;
        cfg.validate()?;
        Ok((bench::run_experiment(&cfg)?, format))
    })();
    match report {
        Ok((report, format)) => export_string(bench::render(&report, format), out_report),
        Err(e) => fail(&e),
    }
}
