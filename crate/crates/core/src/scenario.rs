//! Flexibility scenarios: fixedness flags drawn per vessel from the
//! temporal (T) and spatial (S) flexibility probabilities, and sweep grids
//! over (T, S, observation window).

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Fixedness, Minutes, ScheduleSet, VesselId};

pub const DEFAULT_TAU_HOURS: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("{name} = {value} must lie in [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("buffer tau = {0} h must be finite and non-negative")]
    Tau(f64),
    #[error("observation window of {0} weeks is not one of 1, 2, 3")]
    Weeks(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Probability that a vessel's timing is flexible.
    pub temporal: f64,
    /// Probability that a vessel's berth is interchangeable.
    pub spatial: f64,
    /// Buffer linking adjacent activities, hours.
    pub tau_hours: f64,
    pub seed: u64,
}

impl ScenarioParams {
    pub fn new(temporal: f64, spatial: f64, tau_hours: f64, seed: u64) -> Result<Self, ScenarioError> {
        let p = ScenarioParams {
            temporal,
            spatial,
            tau_hours,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        check_probability("T", self.temporal)?;
        check_probability("S", self.spatial)?;
        tau_minutes(self.tau_hours)?;
        Ok(())
    }

    pub fn tau(&self) -> Result<Minutes, ScenarioError> {
        tau_minutes(self.tau_hours)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ScenarioParams { seed, ..self }
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<(), ScenarioError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ScenarioError::Probability { name, value })
    }
}

/// Buffer in whole minutes.
pub fn tau_minutes(tau_hours: f64) -> Result<Minutes, ScenarioError> {
    if !tau_hours.is_finite() || tau_hours < 0.0 {
        return Err(ScenarioError::Tau(tau_hours));
    }
    Minutes::from_hours(tau_hours).map_err(|_| ScenarioError::Tau(tau_hours))
}

/// Per-vessel flags for one draw: `(temporal, spatial)`.
///
/// Vessels are visited in ascending id order; each takes one temporal then
/// one spatial Bernoulli draw from a ChaCha8 stream seeded with `params.seed`.
pub fn draw_vessel_flags(
    vessels: impl IntoIterator<Item = VesselId>,
    params: &ScenarioParams,
) -> BTreeMap<VesselId, (Fixedness, Fixedness)> {
    let mut ids: Vec<VesselId> = vessels.into_iter().collect();
    ids.sort_unstable();
    ids.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pick = |rng: &mut ChaCha8Rng, p: f64| {
        if rng.gen_bool(p) {
            Fixedness::Flexible
        } else {
            Fixedness::Fixed
        }
    };
    ids.into_iter()
        .map(|id| {
            let t = pick(&mut rng, params.temporal);
            let s = pick(&mut rng, params.spatial);
            (id, (t, s))
        })
        .collect()
}

/// Overwrites every record's flags with its vessel's draw. Timestamps and
/// locations are untouched.
pub fn sample_flags(set: &ScheduleSet, params: &ScenarioParams) -> Result<ScheduleSet, ScenarioError> {
    params.validate()?;
    let flags = draw_vessel_flags(set.vessel_ids(), params);
    let mut out = set.clone();
    for p in &mut out.portcalls {
        for a in &mut p.activities {
            let (t, s) = flags[&a.vessel_id];
            a.flag_temporal = t;
            a.flag_spatial = s;
        }
    }
    Ok(out)
}

/// Seed for the flag draw of one rolling window: the first word of stream
/// `window_index + 1` of a ChaCha8 generator keyed by `base_seed`.
pub fn window_seed(base_seed: u64, window_index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(window_index as u64 + 1);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub window_weeks: u32,
    pub temporal: f64,
    pub spatial: f64,
}

pub fn check_weeks(weeks: u32) -> Result<(), ScenarioError> {
    if (1..=3).contains(&weeks) {
        Ok(())
    } else {
        Err(ScenarioError::Weeks(weeks))
    }
}

/// Cartesian product ordered by window length, then T, then S, each in
/// the order given.
pub fn grid(t_values: &[f64], s_values: &[f64], window_weeks: &[u32]) -> Result<Vec<SweepCell>, ScenarioError> {
    for &t in t_values {
        check_probability("T", t)?;
    }
    for &s in s_values {
        check_probability("S", s)?;
    }
    for &w in window_weeks {
        check_weeks(w)?;
    }
    let mut cells = Vec::with_capacity(t_values.len() * s_values.len() * window_weeks.len());
    for &window_weeks in window_weeks {
        for &temporal in t_values {
            for &spatial in s_values {
                cells.push(SweepCell {
                    window_weeks,
                    temporal,
                    spatial,
                });
            }
        }
    }
    Ok(cells)
}
