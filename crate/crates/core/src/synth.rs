//! Seeded synthetic port traffic.
//!
//! Vessels arrive as a Poisson process, wait at an anchorage, and then queue
//! first-come-first-served for a berth they pick without coordination. The
//! planning lag between leaving the anchorage and the planned berth start,
//! together with any queueing behind the chosen berth, appears in the
//! records as idle time between stays. That idle time is what the
//! compaction heuristic can recover.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::PORTCALL_GAP;
use crate::model::{
    ActivityRecord, Fixedness, GeoPoint, Interval, Minutes, PortTopology, Portcall, ScheduleSet, Timestamp, VesselId,
    Zone, ZoneId, ZoneKind, MINUTES_PER_DAY, MINUTES_PER_HOUR,
};

/// First MMSI handed out to synthetic vessels.
const MMSI_BASE: u64 = 563_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("{0} vessels cannot be served by zero berths")]
    NoBerths(usize),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Lognormal hours, parameterised by the mean and standard deviation of
/// the underlying normal (so the median is `exp(mu)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalHours {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormalHours {
    pub fn with_median(median_hours: f64, sigma: f64) -> Self {
        LogNormalHours {
            mu: median_hours.ln(),
            sigma,
        }
    }

    fn check(&self, name: &str) -> Result<LogNormal<f64>, SynthError> {
        if !self.mu.is_finite() || !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(SynthError::Invalid(format!(
                "{name}: mu/sigma must be finite, sigma >= 0"
            )));
        }
        LogNormal::new(self.mu, self.sigma).map_err(|e| SynthError::Invalid(format!("{name}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Fleet size; each portcall is made by one of these vessels.
    pub n_vessels: usize,
    pub n_berths: usize,
    pub n_anchorages: usize,
    /// Berths are dealt round-robin into this many compat groups.
    pub n_compat_groups: usize,
    pub horizon_days: u32,
    pub start: Timestamp,
    /// Poisson arrival rate, vessels per day.
    pub arrival_rate: f64,
    pub anchorage_stay: LogNormalHours,
    /// Planning lag from anchorage departure to the planned berth start.
    pub anchorage_wait: LogNormalHours,
    pub berth_service: LogNormalHours,
    /// Chance that a portcall visits a second berth.
    pub second_berth_prob: f64,
    /// Idle time between a first and second berth stay.
    pub shift_gap: LogNormalHours,
    /// Unmooring and mooring time a berth needs between two vessels.
    pub berth_changeover: Minutes,
    /// Per-vessel probability that the generated flags are fixed.
    pub fixed_fraction_hint: f64,
}

impl Default for SynthConfig {
    /// Desk-scale month: ~120 portcalls at 10 berths and 4 anchorages.
    fn default() -> Self {
        SynthConfig {
            n_vessels: 90,
            n_berths: 10,
            n_anchorages: 4,
            n_compat_groups: 1,
            horizon_days: 31,
            start: Timestamp::parse("2017-05-01 00:00:00").expect("valid literal"),
            arrival_rate: 4.0,
            anchorage_stay: LogNormalHours::with_median(6.0, 0.6),
            anchorage_wait: LogNormalHours::with_median(10.0, 0.8),
            berth_service: LogNormalHours::with_median(20.0, 0.5),
            second_berth_prob: 0.3,
            shift_gap: LogNormalHours::with_median(3.0, 0.5),
            berth_changeover: Minutes::new(90),
            fixed_fraction_hint: 1.0,
        }
    }
}

impl SynthConfig {
    /// Scale of the real May 2017 data: 62 anchorages, 288 berths,
    /// 1218 vessels and about 1628 portcalls over 31 days.
    pub fn full_scale() -> Self {
        SynthConfig {
            n_vessels: 1218,
            n_berths: 288,
            n_anchorages: 62,
            arrival_rate: 1628.0 / 31.0,
            ..SynthConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_vessels > 0 && self.n_berths == 0 {
            return Err(SynthError::NoBerths(self.n_vessels));
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return Err(SynthError::Invalid("arrival_rate must be positive".into()));
        }
        if self.n_berths > 0 && !(1..=self.n_berths).contains(&self.n_compat_groups) {
            return Err(SynthError::Invalid(
                "n_compat_groups must be between 1 and n_berths".into(),
            ));
        }
        for (name, p) in [
            ("second_berth_prob", self.second_berth_prob),
            ("fixed_fraction_hint", self.fixed_fraction_hint),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::Invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        self.anchorage_stay.check("anchorage_stay")?;
        self.anchorage_wait.check("anchorage_wait")?;
        self.berth_service.check("berth_service")?;
        self.shift_gap.check("shift_gap")?;
        if self.berth_changeover < Minutes::ZERO {
            return Err(SynthError::Invalid("berth_changeover must be non-negative".into()));
        }
        Ok(())
    }
}

fn id_width(n: usize) -> usize {
    n.to_string().len().max(2)
}

fn coordinate(rng: &mut ChaCha8Rng, lat: (f64, f64), lon: (f64, f64)) -> GeoPoint {
    GeoPoint::new(rng.gen_range(lat.0..lat.1), rng.gen_range(lon.0..lon.1))
        .expect("ranges lie within valid coordinates")
}

fn minutes(dist: &LogNormal<f64>, rng: &mut ChaCha8Rng) -> Minutes {
    let m = (dist.sample(rng) * MINUTES_PER_HOUR as f64).round() as i64;
    Minutes::new(m.max(1))
}

fn topology(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> PortTopology {
    let mut zones = Vec::with_capacity(cfg.n_anchorages + cfg.n_berths);
    let aw = id_width(cfg.n_anchorages);
    for i in 0..cfg.n_anchorages {
        zones.push(Zone {
            zone_id: ZoneId::new(format!("A{:0aw$}", i + 1)),
            kind: ZoneKind::Anchorage,
            position: coordinate(rng, (1.15, 1.30), (103.60, 104.05)),
            compat_group: "ANCH".into(),
        });
    }
    let bw = id_width(cfg.n_berths);
    for i in 0..cfg.n_berths {
        zones.push(Zone {
            zone_id: ZoneId::new(format!("B{:0bw$}", i + 1)),
            kind: ZoneKind::Berth,
            position: coordinate(rng, (1.20, 1.35), (103.60, 104.05)),
            compat_group: format!("G{}", i % cfg.n_compat_groups.max(1) + 1),
        });
    }
    PortTopology::new(zones).expect("generated ids are unique")
}

struct Fleet {
    flags: Vec<(Fixedness, Fixedness)>,
    /// End of the latest portcall, or None if never in port.
    last_departure: Vec<Option<Timestamp>>,
}

/// Keeps every idle gap inside a portcall at or below [`PORTCALL_GAP`], so
/// the records regroup into the same portcalls when parsed. Waiting beyond
/// that is spent at an anchorage: an anchorage stay is extended, and a long
/// wait between two berths gets an anchorage stay of its own.
fn bridge_long_gaps(
    activities: &mut Vec<ActivityRecord>,
    anchorages: &[&Zone],
    rng: &mut ChaCha8Rng,
    record: impl Fn(&Zone, Interval) -> ActivityRecord,
) {
    let transit = Minutes::new(30);
    let mut i = 1;
    while i < activities.len() {
        let (prev_end, next_start) = (activities[i - 1].end(), activities[i].start());
        if next_start - prev_end > PORTCALL_GAP {
            if activities[i - 1].zone_kind == ZoneKind::Anchorage {
                let prev = &mut activities[i - 1];
                prev.interval =
                    Interval::new(prev.start(), next_start - PORTCALL_GAP).expect("extension only lengthens the stay");
            } else if !anchorages.is_empty() {
                let zone = anchorages[rng.gen_range(0..anchorages.len())];
                let iv = Interval::new(prev_end + transit, next_start - transit)
                    .expect("gap exceeds twice the transit time");
                activities.insert(i, record(zone, iv));
                i += 1;
            }
        }
        i += 1;
    }
}

/// Generates a baseline schedule and its topology.
///
/// Portcalls that would not finish inside the horizon are generated (they
/// still hold their berths) but left out of the returned set. The result
/// is deterministic in `(cfg, seed)`.
pub fn generate(cfg: &SynthConfig, seed: u64) -> Result<(ScheduleSet, PortTopology), SynthError> {
    cfg.validate()?;
    let stay = cfg.anchorage_stay.check("anchorage_stay")?;
    let wait = cfg.anchorage_wait.check("anchorage_wait")?;
    let service = cfg.berth_service.check("berth_service")?;
    let shift = cfg.shift_gap.check("shift_gap")?;
    let interarrival_days = Exp::new(cfg.arrival_rate).expect("rate checked positive");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = topology(cfg, &mut rng);
    let anchorages: Vec<&Zone> = topo.anchorages().collect();
    let berths: Vec<&Zone> = topo.berths().collect();

    let fixed = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(cfg.fixed_fraction_hint) {
            Fixedness::Fixed
        } else {
            Fixedness::Flexible
        }
    };
    let mut fleet = Fleet {
        flags: (0..cfg.n_vessels).map(|_| (fixed(&mut rng), fixed(&mut rng))).collect(),
        last_departure: vec![None; cfg.n_vessels],
    };

    let horizon_end = cfg.start + Minutes::new(cfg.horizon_days as i64 * MINUTES_PER_DAY);
    let mut berth_free: Vec<Timestamp> = vec![cfg.start; berths.len()];
    let mut portcalls = Vec::new();
    let mut clock = 0.0f64;
    loop {
        if cfg.n_vessels == 0 {
            break;
        }
        clock += interarrival_days.sample(&mut rng) * MINUTES_PER_DAY as f64;
        let arrival = cfg.start + Minutes::new(clock.round() as i64);
        if arrival >= horizon_end {
            break;
        }
        let available: Vec<usize> = (0..cfg.n_vessels)
            .filter(|&v| match fleet.last_departure[v] {
                None => true,
                Some(dep) => arrival - dep > PORTCALL_GAP,
            })
            .collect();
        let Some(&vessel) = available.choose(&mut rng) else {
            continue;
        };
        let vessel_id = VesselId(MMSI_BASE + vessel as u64);
        let (flag_temporal, flag_spatial) = fleet.flags[vessel];
        let record = |zone: &Zone, interval: Interval| ActivityRecord {
            vessel_id,
            zone_kind: zone.kind,
            zone_id: zone.zone_id.clone(),
            position: zone.position,
            interval,
            flag_temporal,
            flag_spatial,
        };

        let mut activities = Vec::with_capacity(3);
        let mut ready = arrival;
        if !anchorages.is_empty() {
            let zone = anchorages[rng.gen_range(0..anchorages.len())];
            let iv = Interval::new(arrival, arrival + minutes(&stay, &mut rng)).expect("positive stay");
            activities.push(record(zone, iv));
            ready = iv.end();
        }
        ready = ready + minutes(&wait, &mut rng);

        // Without anchorages a long wait between two berths cannot be recorded.
        let second = !anchorages.is_empty() && rng.gen_bool(cfg.second_berth_prob);
        let visits = if second { 2 } else { 1 };
        for visit in 0..visits {
            if visit > 0 {
                ready = ready + minutes(&shift, &mut rng);
            }
            let b = rng.gen_range(0..berths.len());
            let start = ready.max(berth_free[b]);
            let iv = Interval::new(start, start + minutes(&service, &mut rng)).expect("positive service");
            berth_free[b] = iv.end() + cfg.berth_changeover;
            activities.push(record(berths[b], iv));
            ready = iv.end();
        }

        bridge_long_gaps(&mut activities, &anchorages, &mut rng, record);

        fleet.last_departure[vessel] = Some(ready);
        if ready <= horizon_end {
            portcalls.push(Portcall { vessel_id, activities });
        }
    }

    Ok((ScheduleSet::from_portcalls(portcalls), topo))
}
