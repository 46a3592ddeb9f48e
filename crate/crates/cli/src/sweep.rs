use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tankersched_core::horizon::run_rolling;
use tankersched_core::model::{PortTopology, ScheduleSet};
use tankersched_core::scenario::{grid, tau_minutes, ScenarioParams, SweepCell};
use tankersched_core::synth::{generate, SynthConfig};

use crate::{emit, load_schedule, load_topology, CliError, SweepArgs};

pub const SWEEP_HEADER: &str =
    "window_weeks,t,s,seed,benchmark_hours,saved_hours,saved_percent,residual_conflicts,step2_comparisons";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub window_weeks: u32,
    pub t: f64,
    pub s: f64,
    pub seed: u64,
    pub benchmark_hours: f64,
    pub saved_hours: f64,
    pub saved_percent: f64,
    pub residual_conflicts: usize,
    pub step2_comparisons: usize,
}

/// Parses `7`, `1,2,5`, `1..20` (inclusive) or a comma list mixing both.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in spec.split(',').map(str::trim) {
        let num = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad seed {s:?} in {spec:?}"))
        };
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(format!("empty seed range {part:?}"));
                }
                seeds.extend(lo..=hi);
            }
            None => seeds.push(num(part)?),
        }
    }
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

enum Data {
    Fixed(ScheduleSet, PortTopology),
    Synthetic,
}

fn ascending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub(crate) fn run(a: SweepArgs) -> Result<(), CliError> {
    tau_minutes(a.tau).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut weeks = a.weeks.clone();
    weeks.sort_unstable();
    weeks.dedup();
    let cells: Vec<SweepCell> =
        grid(&ascending(a.t.clone()), &ascending(a.s.clone()), &weeks).map_err(|e| CliError::Usage(e.to_string()))?;
    let data = match &a.input {
        Some(path) => {
            let set = load_schedule(path)?;
            let topo = load_topology(a.topology.as_deref(), &set)?;
            Data::Fixed(set, topo)
        }
        None => Data::Synthetic,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let jobs: Vec<(SweepCell, u64)> = cells
        .iter()
        .flat_map(|&c| a.seeds.iter().map(move |&seed| (c, seed)))
        .collect();
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, seed)| {
                let synthetic;
                let (set, topo) = match &data {
                    Data::Fixed(set, topo) => (set, topo),
                    Data::Synthetic => {
                        synthetic = generate(&SynthConfig::default(), seed).expect("default config is valid");
                        (&synthetic.0, &synthetic.1)
                    }
                };
                let params = ScenarioParams::new(cell.temporal, cell.spatial, a.tau, seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let r =
                    run_rolling(set, topo, &params, cell.window_weeks).map_err(|e| CliError::Data(e.to_string()))?;
                Ok(SweepRow {
                    window_weeks: cell.window_weeks,
                    t: cell.temporal,
                    s: cell.spatial,
                    seed,
                    benchmark_hours: r.benchmark_hours,
                    saved_hours: r.saved_hours,
                    saved_percent: r.saved_percent,
                    residual_conflicts: r.residual_conflicts,
                    step2_comparisons: r.step2_comparisons,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(SWEEP_HEADER.split(',')).expect("in-memory write");
    }
    for row in &rows {
        w.serialize(row).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory write");
    emit(
        a.output.as_deref(),
        &String::from_utf8(bytes).expect("csv output is UTF-8"),
    )
}
