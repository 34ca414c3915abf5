//! `bench` — run the heart-disease benchmark experiments from the shell.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fedheart::bench::{
    self, emit_report, parse_list, parse_seeds, run_experiment, Experiment, FeatureSet,
    ReportFormat, RunConfig,
};
use fedheart::federation::Strategy;
use fedheart::models::Family;
use fedheart::Error;

#[derive(Parser, Debug)]
#[command(
    name = "bench",
    about = "Seed-reproducible heart-disease benchmark: centralized, federated, \
             local-baseline, shap and grid-search experiments",
    disable_help_flag = false
)]
struct Cli {
    /// centralized | federated | local-baseline | shap | grid-search
    experiment: String,

    /// Directory holding the four UCI center files
    /// (falls back to the FEDHEART_DATA_DIR environment variable)
    #[arg(long)]
    data_dir: Option<PathBuf>,

    /// Comma list of model families (LR,NN1,SVM,NB,DT,RF,KNN);
    /// default depends on the experiment
    #[arg(long)]
    families: Option<String>,

    /// Comma list of strategies (fedavg,fedadam,fedyogi,scaffold)
    #[arg(long)]
    strategies: Option<String>,

    /// Seed list: inclusive range "0..9" or comma list "0,1,2"
    #[arg(long, default_value = "0..9")]
    seeds: String,

    /// Federation rounds R
    #[arg(long, default_value_t = 30)]
    rounds: usize,

    /// Local SGD steps per round
    #[arg(long, default_value_t = 50)]
    local_steps: usize,

    /// Feature subset: table4 (10 features, the 740-row pipeline) or full (13)
    #[arg(long, default_value = "table4")]
    features: String,

    /// Report format: csv | json | markdown
    #[arg(long, default_value = "markdown")]
    format: String,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write a line-delimited per-round trace here (federated only)
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Server learning rate override (default 0.01; 1.0 for SCAFFOLD)
    #[arg(long)]
    eta_g: Option<f64>,

    /// Include single-class Switzerland in local-baseline runs
    #[arg(long)]
    include_switzerland: bool,

    /// Background sample size for shap
    #[arg(long, default_value_t = 100)]
    background: usize,
}

fn build_config(cli: Cli) -> Result<RunConfig, Error> {
    let experiment = Experiment::parse(&cli.experiment)?;
    let data_dir = match cli.data_dir {
        Some(dir) => dir,
        None => std::env::var_os(bench::DATA_DIR_ENV)
            .map(PathBuf::from)
            .ok_or_else(|| {
                Error::usage(format!(
                    "data directory required: pass --data-dir or set {}",
                    bench::DATA_DIR_ENV
                ))
            })?,
    };
    let mut cfg = RunConfig::new(experiment, data_dir);
    if let Some(families) = &cli.families {
        cfg.families = parse_list(families, Family::parse)?;
    }
    if let Some(strategies) = &cli.strategies {
        cfg.strategies = parse_list(strategies, Strategy::parse)?;
    }
    cfg.seeds = parse_seeds(&cli.seeds)?;
    cfg.rounds = cli.rounds;
    cfg.local_steps = cli.local_steps;
    cfg.features = FeatureSet::parse(&cli.features)?;
    cfg.format = ReportFormat::parse(&cli.format)?;
    cfg.out = cli.out;
    cfg.trace = cli.trace;
    cfg.eta_g = cli.eta_g;
    cfg.include_switzerland = cli.include_switzerland;
    cfg.background = cli.background;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints its own message; help/version requests are success.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match build_config(cli) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("bench: {err}");
            return ExitCode::from(err.exit_code());
        }
    };
    match run_experiment(&cfg).and_then(|report| emit_report(&report, cfg.format, cfg.out.as_deref()))
    {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("bench: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
