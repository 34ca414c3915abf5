//! Experiment harness behind the `bench` binary: loads the four hospital
//! files, runs one of five experiments over a seed list, and renders a
//! mean ± std report as csv, json or markdown.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dataset::{self, partition_by_center, Center, FeatureSchema, TabularDataset};
use crate::error::{Error, Result};
use crate::federation::{run_federated, run_local_baseline, FedConfig, Strategy};
use crate::interpret::{background_sample, mean_abs_shap, ShapMethod, ShapReport};
use crate::federation;
use crate::models::{
    centralized_accuracy, default_grid, grid_search, train_model, Family, Hyperparams,
};

/// Fallback environment variable when `--data-dir` is not given.
pub const DATA_DIR_ENV: &str = "FEDHEART_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Centralized,
    Federated,
    LocalBaseline,
    Shap,
    GridSearch,
}

impl Experiment {
    pub fn parse(s: &str) -> Result<Experiment> {
        match s.to_ascii_lowercase().as_str() {
            "centralized" => Ok(Experiment::Centralized),
            "federated" => Ok(Experiment::Federated),
            "local-baseline" => Ok(Experiment::LocalBaseline),
            "shap" => Ok(Experiment::Shap),
            "grid-search" => Ok(Experiment::GridSearch),
            other => Err(Error::usage(format!(
                "unknown experiment '{other}' (expected centralized, federated, \
                 local-baseline, shap or grid-search)"
            ))),
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Experiment::Centralized => "centralized",
            Experiment::Federated => "federated",
            Experiment::LocalBaseline => "local-baseline",
            Experiment::Shap => "shap",
            Experiment::GridSearch => "grid-search",
        };
        f.write_str(name)
    }
}

/// Which feature columns the pipeline keeps before row-dropping.
///
/// `Table4` (the default) excludes slope, ca and thal, whose values are
/// missing for most non-Cleveland rows; this is the subset that keeps the
/// pooled dataset at 740 rows. `Full` keeps all 13 inputs, which row-drops
/// the pool down to roughly 300 almost-all-Cleveland rows — available for
/// inspection, not useful for the four-client experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSet {
    Full,
    Table4,
}

impl FeatureSet {
    pub fn parse(s: &str) -> Result<FeatureSet> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(FeatureSet::Full),
            "table4" => Ok(FeatureSet::Table4),
            other => Err(Error::usage(format!(
                "unknown feature set '{other}' (expected full or table4)"
            ))),
        }
    }

    pub fn subset_names(&self) -> Vec<&'static str> {
        match self {
            FeatureSet::Full => dataset::UCI_FEATURES.iter().map(|&(n, _)| n).collect(),
            FeatureSet::Table4 => FeatureSchema::table4_names(),
        }
    }
}

impl std::fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureSet::Full => "full",
            FeatureSet::Table4 => "table4",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<ReportFormat> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::usage(format!(
                "unknown format '{other}' (expected csv, json or markdown)"
            ))),
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub data_dir: PathBuf,
    pub families: Vec<Family>,
    pub strategies: Vec<Strategy>,
    pub seeds: Vec<u64>,
    pub rounds: usize,
    pub local_steps: usize,
    pub features: FeatureSet,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
    /// Optional line-delimited per-round trace file (federated runs only).
    pub trace: Option<PathBuf>,
    /// Server learning rate override; strategy default when `None`.
    pub eta_g: Option<f64>,
    /// Local baselines skip single-class Switzerland unless asked not to.
    pub include_switzerland: bool,
    /// Background sample size B for the shap experiment.
    pub background: usize,
}

impl RunConfig {
    /// Defaults mirroring the benchmark protocol: seeds 0..9, 30 rounds of
    /// 50 local steps, the 740-row feature subset, markdown to stdout.
    pub fn new(experiment: Experiment, data_dir: PathBuf) -> RunConfig {
        RunConfig {
            experiment,
            data_dir,
            families: default_families(experiment),
            strategies: Strategy::ALL.to_vec(),
            seeds: (0..10).collect(),
            rounds: 30,
            local_steps: 50,
            features: FeatureSet::Table4,
            format: ReportFormat::Markdown,
            out: None,
            trace: None,
            eta_g: None,
            include_switzerland: false,
            background: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::usage("seeds: list must not be empty"));
        }
        if self.families.is_empty() {
            return Err(Error::usage("families: list must not be empty"));
        }
        if matches!(self.experiment, Experiment::Federated) {
            if let Some(bad) = self.families.iter().find(|f| !f.differentiable()) {
                return Err(Error::usage(format!(
                    "families: {bad} cannot be federated (only LR, NN1 and SVM \
                     take gradient steps)"
                )));
            }
            if self.strategies.is_empty() {
                return Err(Error::usage("strategies: list must not be empty"));
            }
        }
        if matches!(self.experiment, Experiment::Shap) && self.background == 0 {
            return Err(Error::usage("background: must be positive"));
        }
        Ok(())
    }

    /// Hex digest over every field that affects the report's numbers.
    pub fn digest(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "experiment={};families={:?};strategies={:?};seeds={:?};rounds={};\
             local_steps={};features={};eta_g={:?};include_switzerland={};background={}",
            self.experiment,
            self.families.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            self.strategies.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            self.seeds,
            self.rounds,
            self.local_steps,
            self.features,
            self.eta_g,
            self.include_switzerland,
            self.background,
        );
        let hash = Sha256::digest(s.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in hash.iter().take(8) {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

fn default_families(experiment: Experiment) -> Vec<Family> {
    match experiment {
        Experiment::Centralized | Experiment::GridSearch => Family::ALL.to_vec(),
        Experiment::Federated | Experiment::LocalBaseline => {
            vec![Family::Lr, Family::Nn1, Family::Svm]
        }
        Experiment::Shap => vec![Family::Lr, Family::Svm],
    }
}

/// A rendered experiment: a labeled rows × columns grid of cell strings.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub experiment: String,
    pub config_digest: String,
    pub seeds: Vec<u64>,
    /// Header of the row-name column ("family", "feature", ...).
    pub row_label: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<String>>,
    /// Wall-clock seconds; excluded from reproducibility comparisons.
    pub runtime_seconds: f64,
}

/// "0.738 ± 0.028" with three decimals.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{mean:.3} ± {std:.3}")
}

/// Parse and row-drop the four hospital files under the configured subset.
pub fn load_dataset(data_dir: &Path, features: FeatureSet) -> Result<TabularDataset> {
    let records = dataset::load_dir(data_dir)?;
    let schema = FeatureSchema::uci();
    dataset::preprocess(&records, &schema, &features.subset_names())
}

/// Run the configured experiment and assemble its report.
pub fn run_experiment(cfg: &RunConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let start = Instant::now();
    let ds = load_dataset(&cfg.data_dir, cfg.features)?;
    let (row_label, rows, columns, cells) = match cfg.experiment {
        Experiment::Centralized => run_centralized(cfg, &ds)?,
        Experiment::Federated => run_federated_experiment(cfg, &ds)?,
        Experiment::LocalBaseline => run_local(cfg, &ds)?,
        Experiment::Shap => run_shap(cfg, &ds)?,
        Experiment::GridSearch => run_grid(cfg, &ds)?,
    };
    Ok(BenchReport {
        experiment: cfg.experiment.to_string(),
        config_digest: cfg.digest(),
        seeds: cfg.seeds.clone(),
        row_label,
        rows,
        columns,
        cells,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

type Grid = (String, Vec<String>, Vec<String>, Vec<Vec<String>>);

/// Pooled-data accuracy per family, plus the fixed reference LR column:
/// one row, one column per configuration.
fn run_centralized(cfg: &RunConfig, ds: &TabularDataset) -> Result<Grid> {
    let mut configs: Vec<(String, Hyperparams)> = cfg
        .families
        .iter()
        .map(|&f| (f.to_string(), Hyperparams::tuned(f)))
        .collect();
    if cfg.families.contains(&Family::Lr) {
        configs.push(("LR-ref".to_string(), Hyperparams::reference_lr()));
    }
    let cells: Vec<String> = configs
        .par_iter()
        .map(|(_, hp)| -> Result<String> {
            let accs = cfg
                .seeds
                .par_iter()
                .map(|&seed| centralized_accuracy(hp, ds, seed))
                .collect::<Result<Vec<f64>>>()?;
            let (mean, std) = federation::mean_std(&accs);
            Ok(format_cell(mean, std))
        })
        .collect::<Result<Vec<_>>>()?;
    let columns = configs.into_iter().map(|(name, _)| name).collect();
    Ok((
        "split".to_string(),
        vec!["pooled".to_string()],
        columns,
        vec![cells],
    ))
}

/// Families × strategies grid of weighted-average federated accuracy.
fn run_federated_experiment(cfg: &RunConfig, ds: &TabularDataset) -> Result<Grid> {
    let mut cells = Vec::with_capacity(cfg.families.len());
    let mut trace_lines: Vec<String> = Vec::new();
    for &family in &cfg.families {
        let mut row = Vec::with_capacity(cfg.strategies.len());
        for &strategy in &cfg.strategies {
            let mut fc = FedConfig::new(family, strategy);
            fc.rounds = cfg.rounds;
            fc.local_steps = cfg.local_steps;
            fc.eta_g = cfg.eta_g;
            let summary = run_federated(ds, &fc, &cfg.seeds)?;
            row.push(format_cell(summary.mean, summary.std));
            if cfg.trace.is_some() {
                for (seed, run) in cfg.seeds.iter().zip(&summary.per_seed) {
                    for t in &run.trace {
                        trace_lines.push(trace_record(family, strategy, *seed, t));
                    }
                }
            }
        }
        cells.push(row);
    }
    if let Some(path) = &cfg.trace {
        write_text(path, &(trace_lines.join("\n") + "\n"))?;
    }
    Ok((
        "family".to_string(),
        cfg.families.iter().map(|f| f.to_string()).collect(),
        cfg.strategies.iter().map(|s| s.to_string()).collect(),
        cells,
    ))
}

fn trace_record(
    family: Family,
    strategy: Strategy,
    seed: u64,
    t: &federation::RoundTrace,
) -> String {
    let accs: Vec<String> = t.client_acc.iter().map(|a| format!("{a:.6}")).collect();
    format!(
        "{{\"family\":\"{family}\",\"strategy\":\"{strategy}\",\"seed\":{seed},\
         \"round\":{},\"checksum\":{:.12e},\"client_acc\":[{}]}}",
        t.round,
        t.checksum,
        accs.join(",")
    )
}

/// Families × centers grid of single-center training accuracy.
fn run_local(cfg: &RunConfig, ds: &TabularDataset) -> Result<Grid> {
    let parts = partition_by_center(ds);
    let centers: Vec<Center> = Center::ALL
        .into_iter()
        .filter(|c| cfg.include_switzerland || *c != Center::Switzerland)
        .collect();
    let mut cells = Vec::with_capacity(cfg.families.len());
    for &family in &cfg.families {
        let hp = Hyperparams::tuned(family);
        let mut row = Vec::with_capacity(centers.len());
        for center in &centers {
            let (mean, std) = run_local_baseline(&parts[center], &hp, &cfg.seeds)?;
            row.push(format_cell(mean, std));
        }
        cells.push(row);
    }
    Ok((
        "family".to_string(),
        cfg.families.iter().map(|f| f.to_string()).collect(),
        centers.iter().map(|c| c.to_string()).collect(),
        cells,
    ))
}

/// Split, train a tuned `family` model and rank its features by exact
/// mean-absolute Shapley attribution over the held-out rows.
pub fn shap_report_for(
    ds: &TabularDataset,
    family: Family,
    seed: u64,
    background: usize,
) -> Result<ShapReport> {
    let hp = Hyperparams::tuned(family);
    let (train, test) = dataset::split_train_test(ds, seed, 0.66)?;
    let (train, test) = if family.standardized() {
        let (a, b, _) = dataset::standardize(&train, &test)?;
        (a, b)
    } else {
        (train, test)
    };
    let model = train_model(&hp, &train, seed)?;
    let background = background_sample(&train, background, seed);
    mean_abs_shap(&model, &test, &background, ShapMethod::Exact)
}

/// Features × families grid of "mean_abs (rank)" attribution cells.
fn run_shap(cfg: &RunConfig, ds: &TabularDataset) -> Result<Grid> {
    let seed = cfg.seeds[0];
    let feature_names: Vec<String> = ds.schema.names().iter().map(|s| s.to_string()).collect();
    let mut columns = Vec::with_capacity(cfg.families.len());
    let mut per_family = Vec::with_capacity(cfg.families.len());
    for &family in &cfg.families {
        let report = shap_report_for(ds, family, seed, cfg.background)?;
        columns.push(family.to_string());
        per_family.push(report);
    }
    let cells: Vec<Vec<String>> = (0..feature_names.len())
        .map(|i| {
            per_family
                .iter()
                .map(|r| format!("{:.3} ({})", r.mean_abs[i], r.ranks[i]))
                .collect()
        })
        .collect();
    Ok(("feature".to_string(), feature_names, columns, cells))
}

/// Best tuned configuration per family with its mean accuracy.
fn run_grid(cfg: &RunConfig, ds: &TabularDataset) -> Result<Grid> {
    let results: Vec<(String, String)> = cfg
        .families
        .par_iter()
        .map(|&family| -> Result<(String, String)> {
            let grid = default_grid(family);
            let (best, acc) = grid_search(family, &grid, &cfg.seeds, ds)?;
            Ok((describe_hp(&best), format!("{acc:.3}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = results
        .into_iter()
        .map(|(config, acc)| vec![config, acc])
        .collect();
    Ok((
        "family".to_string(),
        cfg.families.iter().map(|f| f.to_string()).collect(),
        vec!["configuration".to_string(), "accuracy".to_string()],
        cells,
    ))
}

/// Compact one-line rendering of the fields a family actually uses.
fn describe_hp(hp: &Hyperparams) -> String {
    match hp.family {
        Family::Lr => format!("lr={}, batch={}", hp.learning_rate, hp.batch_size),
        Family::Nn1 => format!(
            "lr={}, batch={}, hidden={}",
            hp.learning_rate, hp.batch_size, hp.hidden_units
        ),
        Family::Svm => format!(
            "lr={}, batch={}, C={}",
            hp.learning_rate, hp.batch_size, hp.c
        ),
        Family::Nb => format!("alpha={}", hp.alpha),
        Family::Dt => match hp.max_depth {
            Some(d) => format!("max_depth={d}"),
            None => "max_depth=none".to_string(),
        },
        Family::Rf => match hp.max_depth {
            Some(d) => format!("trees={}, max_depth={d}", hp.n_estimators),
            None => format!("trees={}, max_depth=none", hp.n_estimators),
        },
        Family::Knn => format!("k={}", hp.k),
    }
}

/// Render the report in the requested format.
pub fn render(report: &BenchReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => render_json(report),
        ReportFormat::Markdown => render_markdown(report),
    }
}

fn render_csv(report: &BenchReport) -> String {
    let mut out = String::new();
    let header: Vec<&str> = std::iter::once(report.row_label.as_str())
        .chain(report.columns.iter().map(|c| c.as_str()))
        .collect();
    let _ = writeln!(out, "{}", header.join(","));
    for (name, row) in report.rows.iter().zip(&report.cells) {
        let line: Vec<&str> = std::iter::once(name.as_str())
            .chain(row.iter().map(|c| c.as_str()))
            .collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

fn render_json(report: &BenchReport) -> String {
    let mut cells = BTreeMap::new();
    for (name, row) in report.rows.iter().zip(&report.cells) {
        let inner: BTreeMap<&str, &str> = report
            .columns
            .iter()
            .map(|c| c.as_str())
            .zip(row.iter().map(|c| c.as_str()))
            .collect();
        cells.insert(name.as_str(), inner);
    }
    let value = serde_json::json!({
        "experiment": report.experiment,
        "config": report.config_digest,
        "seeds": report.seeds,
        "row_label": report.row_label,
        "cells": cells,
        "runtime_seconds": report.runtime_seconds,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}

fn render_markdown(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# bench: {} (config {})",
        report.experiment, report.config_digest
    );
    let seeds: Vec<String> = report.seeds.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "seeds: {}", seeds.join(","));
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "| {} | {} |",
        report.row_label,
        report.columns.join(" | ")
    );
    let dashes: Vec<&str> = std::iter::repeat("---")
        .take(report.columns.len() + 1)
        .collect();
    let _ = writeln!(out, "| {} |", dashes.join(" | "));
    for (name, row) in report.rows.iter().zip(&report.cells) {
        let _ = writeln!(out, "| {} | {} |", name, row.join(" | "));
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Render and either write to `cfg.out` or print to stdout.
pub fn emit_report(report: &BenchReport, format: ReportFormat, out: Option<&Path>) -> Result<()> {
    let text = render(report, format);
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parse "0..9" (inclusive), "3" or "0,2,5" into a seed list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("seeds: bad range start '{a}'")))?;
        let hi: u64 = b
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("seeds: bad range end '{b}'")))?;
        if hi < lo {
            return Err(Error::usage(format!("seeds: empty range '{s}'")));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::usage(format!("seeds: bad value '{part}'")))
        })
        .collect()
}

/// Split a comma list and parse each entry with `parse`.
pub fn parse_list<T>(s: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(|part| parse(part.trim()))
        .collect::<Result<Vec<T>>>()
        .and_then(|list| {
            if list.is_empty() {
                Err(Error::usage("empty list"))
            } else {
                Ok(list)
            }
        })
}
