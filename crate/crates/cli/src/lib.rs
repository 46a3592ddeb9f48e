//! Command-line driver: `synth`, `optimize`, `sweep` and `report`.
//!
//! Exit codes are 0 on success, 1 for bad input data and 2 for bad
//! arguments.

mod report;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use tankersched_core::heuristic::{optimize_as_flagged, optimize_with, HeuristicError};
use tankersched_core::ingest::{emit_records, emit_topology, parse_records, parse_topology};
use tankersched_core::model::{Minutes, PortTopology, ScheduleSet};
use tankersched_core::scenario::{tau_minutes, ScenarioParams, DEFAULT_TAU_HOURS};
use tankersched_core::synth::{generate, SynthConfig};

pub use report::ReportFormat;
pub use sweep::{parse_seeds, SweepRow, SWEEP_HEADER};

/// Compat group given to every zone when no topology file is supplied.
pub const INFERRED_GROUP: &str = "default";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tankersched", version, about = "Tanker berth schedule compaction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic schedule and its port topology.
    Synth(SynthArgs),
    /// Optimize one schedule and write a JSON report.
    Optimize(OptimizeArgs),
    /// Run the rolling-horizon harness over a (T, S, weeks, seed) grid.
    Sweep(SweepArgs),
    /// Format sweep results as T by S savings matrices.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Fleet size.
    #[arg(long, default_value_t = SynthConfig::default().n_vessels)]
    pub vessels: usize,
    #[arg(long, default_value_t = SynthConfig::default().n_berths)]
    pub berths: usize,
    #[arg(long, default_value_t = SynthConfig::default().n_anchorages)]
    pub anchorages: usize,
    /// Number of berth compat groups.
    #[arg(long, default_value_t = SynthConfig::default().n_compat_groups)]
    pub groups: usize,
    #[arg(long, default_value_t = SynthConfig::default().horizon_days)]
    pub days: u32,
    /// Arrivals per day.
    #[arg(long, default_value_t = SynthConfig::default().arrival_rate)]
    pub rate: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Schedule CSV to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Topology CSV to write.
    #[arg(long)]
    pub topology: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Schedule CSV.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Topology CSV; without it every zone is one compat group.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Temporal flexibility. Without --t/--s the flags in the input are used.
    #[arg(long, requires = "s")]
    pub t: Option<f64>,
    /// Spatial flexibility.
    #[arg(long, requires = "t")]
    pub s: Option<f64>,
    /// Buffer between consecutive stays of a vessel, hours.
    #[arg(long, default_value_t = DEFAULT_TAU_HOURS)]
    pub tau: f64,
    /// Seed of the flag draw.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub max_passes: Option<usize>,
    /// Report file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the optimized schedule CSV here.
    #[arg(long)]
    pub schedule_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Schedule CSV; without it each seed gets its own synthetic month.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    pub topology: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,0.9")]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,0.9")]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub weeks: Vec<u32>,
    /// Seeds such as `1`, `1,2` or `1..20`.
    // full path so clap takes the parsed list as one value
    #[arg(long, default_value = "1", value_parser = parse_seeds)]
    pub seeds: std::vec::Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_TAU_HOURS)]
    pub tau: f64,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Results CSV; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results CSV written by `sweep`.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Report file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Directory for one plot-ready CSV per (T, S) cell.
    #[arg(long)]
    pub series_dir: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Optimize(a) => optimize(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Report(a) => report::run(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `path`, or to standard output.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn load_schedule(path: &Path) -> Result<ScheduleSet, CliError> {
    parse_records(&read(path)?)
        .map(|p| p.set)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_topology(path: Option<&Path>, set: &ScheduleSet) -> Result<PortTopology, CliError> {
    match path {
        Some(p) => parse_topology(&read(p)?).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => Ok(PortTopology::inferred(set, INFERRED_GROUP)),
    }
}

fn synth(a: SynthArgs) -> Result<(), CliError> {
    let cfg = SynthConfig {
        n_vessels: a.vessels,
        n_berths: a.berths,
        n_anchorages: a.anchorages,
        n_compat_groups: a.groups,
        horizon_days: a.days,
        arrival_rate: a.rate,
        ..SynthConfig::default()
    };
    let (set, topo) = generate(&cfg, a.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    write(&a.output, &emit_records(&set))?;
    write(&a.topology, &emit_topology(&topo))
}

fn heuristic_error(e: HeuristicError) -> CliError {
    match e {
        HeuristicError::Scenario(e) => CliError::Usage(e.to_string()),
        other => CliError::Data(other.to_string()),
    }
}

fn optimize(a: OptimizeArgs) -> Result<(), CliError> {
    let tau: Minutes = tau_minutes(a.tau).map_err(|e| CliError::Usage(e.to_string()))?;
    let params = match (a.t, a.s) {
        (Some(t), Some(s)) => {
            Some(ScenarioParams::new(t, s, a.tau, a.seed).map_err(|e| CliError::Usage(e.to_string()))?)
        }
        _ => None,
    };
    let set = load_schedule(&a.input)?;
    let topo = load_topology(a.topology.as_deref(), &set)?;
    let report = match &params {
        Some(p) => optimize_with(&set, &topo, p, a.max_passes),
        None => optimize_as_flagged(&set, &topo, tau, a.max_passes),
    }
    .map_err(heuristic_error)?;

    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(a.output.as_deref(), &json)?;
    if let Some(path) = &a.schedule_out {
        write(path, &emit_records(&report.optimized))?;
    }
    Ok(())
}
