//! Weekly rolling horizon: the planning period is cut into observation
//! windows of one to three weeks that advance a week at a time, each
//! window is optimized on its own, and the per-window results are combined
//! as averages weighted by vessel count.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::heuristic::{optimize_in_context, HeuristicError};
use crate::model::{Minutes, PortTopology, Portcall, ScheduleSet, Timestamp, MINUTES_PER_DAY, MINUTES_PER_WEEK};
use crate::scenario::{check_weeks, window_seed, ScenarioError, ScenarioParams};

#[derive(Debug, Error)]
pub enum HorizonError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("weighted average needs equal-length inputs ({values} values, {weights} weights)")]
    LengthMismatch { values: usize, weights: usize },
    #[error("weighted average needs a positive total weight")]
    ZeroWeight,
    #[error("baseline turnaround must be positive, got {0} h")]
    NonPositiveBaseline(f64),
    #[error("window {label}: {source}")]
    Window {
        label: String,
        #[source]
        source: HeuristicError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowSpec {
    pub label: String,
    pub start: Timestamp,
    pub end: Timestamp,
    /// Portcalls whose first stay starts inside the window.
    pub vessel_count: usize,
}

fn label(first_week: usize, weeks: usize) -> String {
    (first_week..first_week + weeks)
        .map(|w| format!("wk{}", w + 1))
        .collect::<Vec<_>>()
        .join("+")
}

/// Windows of `window_weeks` weeks starting at the set's window start and
/// advancing by 7 days, each paired with the portcalls that start inside
/// it. The last window may be cut short by the end of the period.
pub fn slice_windows(set: &ScheduleSet, window_weeks: u32) -> Result<Vec<(WindowSpec, ScheduleSet)>, HorizonError> {
    Ok(slice_with_carry_in(set, window_weeks)?
        .into_iter()
        .map(|w| (w.spec, w.set))
        .collect())
}

/// One observation window with the earlier portcalls still in port when
/// it opens.
#[derive(Debug, Clone)]
pub struct Window {
    pub spec: WindowSpec,
    pub set: ScheduleSet,
    pub carry_in: Vec<Portcall>,
}

pub fn slice_with_carry_in(set: &ScheduleSet, window_weeks: u32) -> Result<Vec<Window>, HorizonError> {
    check_weeks(window_weeks)?;
    let span = (set.window_end - set.window_start).get();
    if span <= 0 {
        return Ok(Vec::new());
    }
    let weeks_in_period = (span + MINUTES_PER_WEEK - 1) / MINUTES_PER_WEEK;
    let k = (window_weeks as i64).min(weeks_in_period);
    let count = weeks_in_period - k + 1;

    let mut out = Vec::with_capacity(count as usize);
    for i in 0..count {
        let start = set.window_start + Minutes::new(i * MINUTES_PER_WEEK);
        let end = (start + Minutes::new(k * MINUTES_PER_WEEK)).min(set.window_end);
        let portcalls: Vec<_> = set
            .portcalls
            .iter()
            .filter(|p| p.first_start().is_some_and(|t| start <= t && t < end))
            .cloned()
            .collect();
        let spec = WindowSpec {
            label: label(i as usize, k as usize),
            start,
            end,
            vessel_count: portcalls.len(),
        };
        let carry_in: Vec<Portcall> = set
            .portcalls
            .iter()
            .filter(|p| p.first_start().is_some_and(|t| t < start) && p.last_end().is_some_and(|t| t > start))
            .cloned()
            .collect();
        let mut window = ScheduleSet::with_window(portcalls, start, end);
        window.widen_window_to_fit();
        out.push(Window {
            spec,
            set: window,
            carry_in,
        });
    }
    Ok(out)
}

/// Σ(vᵢwᵢ) / Σwᵢ.
pub fn weighted_average(values: &[f64], weights: &[usize]) -> Result<f64, HorizonError> {
    if values.len() != weights.len() {
        return Err(HorizonError::LengthMismatch {
            values: values.len(),
            weights: weights.len(),
        });
    }
    let total: usize = weights.iter().sum();
    if total == 0 {
        return Err(HorizonError::ZeroWeight);
    }
    let sum: f64 = values.iter().zip(weights).map(|(v, &w)| v * w as f64).sum();
    Ok(sum / total as f64)
}

/// Hours saved and the same saving as a percentage of the baseline.
pub fn savings(baseline_hours: f64, optimized_hours: f64) -> Result<(f64, f64), HorizonError> {
    if baseline_hours.is_nan() || baseline_hours <= 0.0 {
        return Err(HorizonError::NonPositiveBaseline(baseline_hours));
    }
    let saved = baseline_hours - optimized_hours;
    Ok((saved, 100.0 * saved / baseline_hours))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowResult {
    pub window: WindowSpec,
    pub flag_seed: u64,
    pub baseline_mean_hours: f64,
    pub optimized_mean_hours: f64,
    pub residual_conflicts: usize,
    pub step2_comparisons: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingReport {
    pub window_weeks: u32,
    pub params: ScenarioParams,
    pub windows: Vec<WindowResult>,
    /// Vessel-weighted mean baseline turnaround over all windows.
    pub benchmark_hours: f64,
    pub optimized_hours: f64,
    pub saved_hours: f64,
    pub saved_percent: f64,
    pub residual_conflicts: usize,
    pub step2_comparisons: usize,
}

/// Optimizes every window independently and aggregates. Window `i` draws
/// its flags with seed `window_seed(params.seed, i)`.
pub fn run_rolling(
    set: &ScheduleSet,
    topo: &PortTopology,
    params: &ScenarioParams,
    window_weeks: u32,
) -> Result<RollingReport, HorizonError> {
    params.validate()?;
    let windows = slice_with_carry_in(set, window_weeks)?;
    let results = windows
        .into_par_iter()
        .enumerate()
        .map(|(i, w)| {
            let seed = window_seed(params.seed, i);
            let spec = w.spec;
            let report =
                optimize_in_context(&w.set, &w.carry_in, topo, &params.with_seed(seed), None).map_err(|source| {
                    HorizonError::Window {
                        label: spec.label.clone(),
                        source,
                    }
                })?;
            Ok(WindowResult {
                window: spec,
                flag_seed: seed,
                baseline_mean_hours: report.baseline_mean_hours,
                optimized_mean_hours: report.optimized_mean_hours,
                residual_conflicts: report.residual_conflicts.len(),
                step2_comparisons: report.counters.step2_comparisons,
            })
        })
        .collect::<Result<Vec<_>, HorizonError>>()?;

    let weights: Vec<usize> = results.iter().map(|r| r.window.vessel_count).collect();
    let (benchmark_hours, optimized_hours, saved_hours, saved_percent) = if weights.iter().sum::<usize>() == 0 {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let before: Vec<f64> = results.iter().map(|r| r.baseline_mean_hours).collect();
        let after: Vec<f64> = results.iter().map(|r| r.optimized_mean_hours).collect();
        let b = weighted_average(&before, &weights)?;
        let a = weighted_average(&after, &weights)?;
        let (h, pct) = savings(b, a)?;
        (b, a, h, pct)
    };
    Ok(RollingReport {
        window_weeks,
        params: *params,
        benchmark_hours,
        optimized_hours,
        saved_hours,
        saved_percent,
        residual_conflicts: results.iter().map(|r| r.residual_conflicts).sum(),
        step2_comparisons: results.iter().map(|r| r.step2_comparisons).sum(),
        windows: results,
    })
}

/// Length of the period covered by `set`, in whole days.
pub fn period_days(set: &ScheduleSet) -> i64 {
    (set.window_end - set.window_start).get() / MINUTES_PER_DAY
}
