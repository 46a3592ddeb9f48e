//! Two-step schedule optimizer.
//!
//! Step 1 compacts each vessel's own sequence of stays. Step 2 then walks
//! each berth and resolves the overlaps Step 1 created, preferring in turn
//! to delay the later stay, move the earlier one to a free berth, or move
//! the later one. Conflicts between stays that may not move at all are
//! left in place and reported.

mod step1;
mod step2;

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    turnaround, validate, Fixedness, Minutes, ModelError, PortTopology, Portcall, ScheduleSet, VesselId, Violation,
};
use crate::scenario::{sample_flags, ScenarioError, ScenarioParams};

pub use step1::step1_compact;
pub use step2::{find_available_berth, step2_deconflict, OpCounters, ResidualConflict};

#[derive(Debug, Error)]
pub enum HeuristicError {
    #[error("compat group {0} has no berths")]
    UnknownGroup(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid schedule: {0}")]
    Invalid(Violation),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortcallOutcome {
    pub vessel_id: VesselId,
    pub baseline_hours: f64,
    pub optimized_hours: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub tau_hours: f64,
    /// Seed of the flag draw; `None` when the input's own flags were used.
    pub flag_seed: Option<u64>,
    pub portcalls: Vec<PortcallOutcome>,
    pub baseline_mean_hours: f64,
    pub optimized_mean_hours: f64,
    pub saved_hours: f64,
    pub saved_percent: f64,
    pub residual_conflicts: Vec<ResidualConflict>,
    pub counters: OpCounters,
    #[serde(skip)]
    pub optimized: ScheduleSet,
}

impl OptimizationReport {
    pub fn vessel_count(&self) -> usize {
        self.portcalls.len()
    }
}

/// Draws flags from `params`, then runs both steps.
pub fn optimize(
    set: &ScheduleSet,
    topo: &PortTopology,
    params: &ScenarioParams,
) -> Result<OptimizationReport, HeuristicError> {
    optimize_with(set, topo, params, None)
}

pub fn optimize_with(
    set: &ScheduleSet,
    topo: &PortTopology,
    params: &ScenarioParams,
    max_passes: Option<usize>,
) -> Result<OptimizationReport, HeuristicError> {
    optimize_in_context(set, &[], topo, params, max_passes)
}

/// Optimizes `set` around `carry_in`: portcalls that started earlier but
/// still occupy berths. Carried-in stays are treated as fully fixed and are
/// left out of the turnaround figures.
pub fn optimize_in_context(
    set: &ScheduleSet,
    carry_in: &[Portcall],
    topo: &PortTopology,
    params: &ScenarioParams,
    max_passes: Option<usize>,
) -> Result<OptimizationReport, HeuristicError> {
    let flagged = sample_flags(set, params)?;
    let mut report = run(&flagged, carry_in, topo, params.tau()?, max_passes)?;
    report.flag_seed = Some(params.seed);
    Ok(report)
}

/// Runs both steps using the flags already on the records.
pub fn optimize_as_flagged(
    set: &ScheduleSet,
    topo: &PortTopology,
    tau: Minutes,
    max_passes: Option<usize>,
) -> Result<OptimizationReport, HeuristicError> {
    run(set, &[], topo, tau, max_passes)
}

/// Structural checks only. Overlaps already present in the input are
/// carried through and show up as residual conflicts.
fn check_structure(set: &ScheduleSet, topo: &PortTopology) -> Result<(), HeuristicError> {
    match validate(set, topo)
        .into_iter()
        .find(|v| !matches!(v, Violation::BerthOverlap(_) | Violation::OutOfWindow { .. }))
    {
        Some(v) => Err(HeuristicError::Invalid(v)),
        None => Ok(()),
    }
}

fn run(
    set: &ScheduleSet,
    carry_in: &[Portcall],
    topo: &PortTopology,
    tau: Minutes,
    max_passes: Option<usize>,
) -> Result<OptimizationReport, HeuristicError> {
    let combined = if carry_in.is_empty() {
        set.clone()
    } else {
        let mut portcalls = set.portcalls.clone();
        portcalls.extend(carry_in.iter().cloned().map(|mut p| {
            for a in &mut p.activities {
                a.flag_temporal = Fixedness::Fixed;
                a.flag_spatial = Fixedness::Fixed;
            }
            p
        }));
        let mut c = ScheduleSet::with_window(portcalls, set.window_start, set.window_end);
        c.widen_window_to_fit();
        c
    };
    check_structure(&combined, topo)?;
    let (compacted, step1_visits) = step1_compact(&combined, topo, tau);
    let (mut optimized, residual_conflicts, mut counters) =
        step2::deconflict(&compacted, &combined, topo, tau, max_passes);
    counters.step1_visits = step1_visits;
    optimized.portcalls.truncate(set.portcalls.len());

    let mut portcalls = Vec::with_capacity(set.portcalls.len());
    for (before, after) in set.portcalls.iter().zip(&optimized.portcalls) {
        portcalls.push(PortcallOutcome {
            vessel_id: before.vessel_id,
            baseline_hours: turnaround(before)?.hours(),
            optimized_hours: turnaround(after)?.hours(),
        });
    }
    let (baseline_mean_hours, optimized_mean_hours) = if portcalls.is_empty() {
        (0.0, 0.0)
    } else {
        let n = portcalls.len() as f64;
        (
            portcalls.iter().map(|p| p.baseline_hours).sum::<f64>() / n,
            portcalls.iter().map(|p| p.optimized_hours).sum::<f64>() / n,
        )
    };
    let saved_hours = baseline_mean_hours - optimized_mean_hours;
    let saved_percent = if baseline_mean_hours > 0.0 {
        100.0 * saved_hours / baseline_mean_hours
    } else {
        0.0
    };
    Ok(OptimizationReport {
        tau_hours: tau.hours(),
        flag_seed: None,
        portcalls,
        baseline_mean_hours,
        optimized_mean_hours,
        saved_hours,
        saved_percent,
        residual_conflicts,
        counters,
        optimized,
    })
}
