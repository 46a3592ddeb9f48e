//! Domain types shared by every stage: stay records, portcalls, schedule
//! sets, the port topology and the turnaround metric.

mod geo;
mod time;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geo::GeoPoint;
pub use time::{
    intervals_overlap, Interval, Minutes, Timestamp, MINUTES_PER_DAY, MINUTES_PER_HOUR, MINUTES_PER_WEEK,
    TIMESTAMP_FORMAT,
};
pub use validate::{berth_overlaps, validate, BerthOverlap, RecordRef, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("empty portcall")]
    EmptyPortcall,
    #[error("degenerate interval [{start}, {end})")]
    DegenerateInterval { start: Timestamp, end: Timestamp },
    #[error("timestamp {0} has a non-zero seconds field")]
    SubMinuteTimestamp(String),
    #[error("cannot parse timestamp {0:?}: {1}")]
    BadTimestamp(String, String),
    #[error("non-finite hour value {0}")]
    NonFiniteHours(f64),
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeOutOfRange(f64),
    #[error("longitude {0} outside [-180, 180]")]
    LongitudeOutOfRange(f64),
    #[error("bad coordinate {0:?}: {1}")]
    BadCoordinate(String, &'static str),
    #[error("unknown zone kind {0:?}")]
    BadZoneKind(String),
    #[error("fixedness flag must be 0 or 1, got {0:?}")]
    BadFlag(String),
    #[error("duplicate zone id {0}")]
    DuplicateZone(ZoneId),
    #[error("berth {0} has no compat group")]
    MissingCompatGroup(ZoneId),
    #[error("portcall mixes vessels {0} and {1}")]
    MixedVessels(VesselId, VesselId),
    #[error("portcall activities of vessel {0} are unsorted or overlap")]
    UnsortedPortcall(VesselId),
}

/// MMSI-like vessel identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VesselId(pub u64);

impl fmt::Display for VesselId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZoneId(pub String);

impl ZoneId {
    pub fn new(id: impl Into<String>) -> Self {
        ZoneId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ZoneKind {
    Anchorage,
    Berth,
}

impl ZoneKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ZoneKind::Anchorage => "ANCHORAGE",
            ZoneKind::Berth => "BERTH",
        }
    }
}

impl FromStr for ZoneKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ANCHORAGE" => Ok(ZoneKind::Anchorage),
            "BERTH" => Ok(ZoneKind::Berth),
            other => Err(ModelError::BadZoneKind(other.to_string())),
        }
    }
}

impl fmt::Display for ZoneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the timing or location of a stay may be rescheduled.
/// Encoded on the wire as `0` (flexible) or `1` (fixed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fixedness {
    Flexible,
    Fixed,
}

impl Fixedness {
    #[inline]
    pub fn is_flexible(self) -> bool {
        self == Fixedness::Flexible
    }

    #[inline]
    pub fn is_fixed(self) -> bool {
        self == Fixedness::Fixed
    }

    pub fn as_char(self) -> char {
        match self {
            Fixedness::Flexible => '0',
            Fixedness::Fixed => '1',
        }
    }
}

impl FromStr for Fixedness {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Fixedness::Flexible),
            "1" => Ok(Fixedness::Fixed),
            other => Err(ModelError::BadFlag(other.to_string())),
        }
    }
}

/// One vessel stay at an anchorage or berth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityRecord {
    pub vessel_id: VesselId,
    pub zone_kind: ZoneKind,
    pub zone_id: ZoneId,
    pub position: GeoPoint,
    pub interval: Interval,
    pub flag_temporal: Fixedness,
    pub flag_spatial: Fixedness,
}

impl ActivityRecord {
    #[inline]
    pub fn start(&self) -> Timestamp {
        self.interval.start()
    }

    #[inline]
    pub fn end(&self) -> Timestamp {
        self.interval.end()
    }

    #[inline]
    pub fn duration(&self) -> Minutes {
        self.interval.duration()
    }

    #[inline]
    pub fn is_berth(&self) -> bool {
        self.zone_kind == ZoneKind::Berth
    }

    pub fn is_fully_fixed(&self) -> bool {
        self.flag_temporal.is_fixed() && self.flag_spatial.is_fixed()
    }

    pub fn with_flags(mut self, temporal: Fixedness, spatial: Fixedness) -> Self {
        self.flag_temporal = temporal;
        self.flag_spatial = spatial;
        self
    }
}

/// A vessel's visit to port: its stays in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portcall {
    pub vessel_id: VesselId,
    pub activities: Vec<ActivityRecord>,
}

impl Portcall {
    /// Checks the portcall invariants: non-empty, one vessel, sorted,
    /// no self-overlap.
    pub fn new(activities: Vec<ActivityRecord>) -> Result<Self, ModelError> {
        let first = activities.first().ok_or(ModelError::EmptyPortcall)?;
        let vessel_id = first.vessel_id;
        for pair in activities.windows(2) {
            if pair[1].vessel_id != vessel_id {
                return Err(ModelError::MixedVessels(vessel_id, pair[1].vessel_id));
            }
            if pair[1].start() < pair[0].end() {
                return Err(ModelError::UnsortedPortcall(vessel_id));
            }
        }
        Ok(Portcall { vessel_id, activities })
    }

    pub fn first_start(&self) -> Option<Timestamp> {
        self.activities.first().map(ActivityRecord::start)
    }

    pub fn last_end(&self) -> Option<Timestamp> {
        self.activities.last().map(ActivityRecord::end)
    }

    /// Sum of stay durations, excluding idle gaps.
    pub fn busy_time(&self) -> Minutes {
        self.activities.iter().fold(Minutes::ZERO, |acc, a| acc + a.duration())
    }
}

/// First activity start to last activity end.
pub fn turnaround(portcall: &Portcall) -> Result<Minutes, ModelError> {
    match (portcall.first_start(), portcall.last_end()) {
        (Some(start), Some(end)) => Ok(end - start),
        _ => Err(ModelError::EmptyPortcall),
    }
}

pub fn turnaround_hours(portcall: &Portcall) -> Result<f64, ModelError> {
    turnaround(portcall).map(Minutes::hours)
}

/// Every portcall in one observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSet {
    pub portcalls: Vec<Portcall>,
    pub window_start: Timestamp,
    pub window_end: Timestamp,
}

impl ScheduleSet {
    /// Canonical form: portcalls ordered by (first start, vessel id) and a
    /// window spanning whole days from the first start to the last end.
    pub fn from_portcalls(mut portcalls: Vec<Portcall>) -> Self {
        portcalls.sort_by_key(|p| (p.first_start(), p.vessel_id));
        let (window_start, window_end) = day_hull(&portcalls);
        ScheduleSet {
            portcalls,
            window_start,
            window_end,
        }
    }

    /// Keeps portcall order and uses the given window as-is.
    pub fn with_window(portcalls: Vec<Portcall>, window_start: Timestamp, window_end: Timestamp) -> Self {
        ScheduleSet {
            portcalls,
            window_start,
            window_end,
        }
    }

    pub fn empty() -> Self {
        ScheduleSet::from_portcalls(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.portcalls.is_empty()
    }

    pub fn activity_count(&self) -> usize {
        self.portcalls.iter().map(|p| p.activities.len()).sum()
    }

    pub fn activities(&self) -> impl Iterator<Item = &ActivityRecord> {
        self.portcalls.iter().flat_map(|p| p.activities.iter())
    }

    pub fn vessel_ids(&self) -> BTreeSet<VesselId> {
        self.portcalls.iter().map(|p| p.vessel_id).collect()
    }

    /// Extends the window end, if needed, to cover every activity.
    pub fn widen_window_to_fit(&mut self) {
        if let Some(last) = self.activities().map(ActivityRecord::end).max() {
            if last > self.window_end {
                self.window_end = last.ceil_day();
            }
        }
    }
}

fn day_hull(portcalls: &[Portcall]) -> (Timestamp, Timestamp) {
    let start = portcalls.iter().filter_map(Portcall::first_start).min();
    let end = portcalls
        .iter()
        .flat_map(|p| p.activities.iter().map(ActivityRecord::end))
        .max();
    match (start, end) {
        (Some(s), Some(e)) => (s.floor_day(), e.ceil_day()),
        _ => (Timestamp::default(), Timestamp::default()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub zone_id: ZoneId,
    pub kind: ZoneKind,
    pub position: GeoPoint,
    pub compat_group: String,
}

/// Anchorages and berths. Berths in the same compat group are interchangeable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PortTopology {
    zones: BTreeMap<ZoneId, Zone>,
}

impl PortTopology {
    pub fn new(zones: impl IntoIterator<Item = Zone>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for zone in zones {
            if zone.kind == ZoneKind::Berth && zone.compat_group.is_empty() {
                return Err(ModelError::MissingCompatGroup(zone.zone_id));
            }
            if map.contains_key(&zone.zone_id) {
                return Err(ModelError::DuplicateZone(zone.zone_id));
            }
            map.insert(zone.zone_id.clone(), zone);
        }
        Ok(PortTopology { zones: map })
    }

    /// Topology implied by the records of a schedule: each zone takes the
    /// position of its first record and every zone joins `group`.
    pub fn inferred(set: &ScheduleSet, group: &str) -> Self {
        let mut zones = BTreeMap::new();
        for a in set.activities() {
            zones.entry(a.zone_id.clone()).or_insert_with(|| Zone {
                zone_id: a.zone_id.clone(),
                kind: a.zone_kind,
                position: a.position,
                compat_group: group.to_string(),
            });
        }
        PortTopology { zones }
    }

    pub fn zone(&self, id: &ZoneId) -> Option<&Zone> {
        self.zones.get(id)
    }

    /// Zones in ascending id order.
    pub fn zones(&self) -> impl Iterator<Item = &Zone> {
        self.zones.values()
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn berths(&self) -> impl Iterator<Item = &Zone> {
        self.zones.values().filter(|z| z.kind == ZoneKind::Berth)
    }

    pub fn anchorages(&self) -> impl Iterator<Item = &Zone> {
        self.zones.values().filter(|z| z.kind == ZoneKind::Anchorage)
    }

    /// Berths of one compat group, ascending by id.
    pub fn berths_in_group<'a>(&'a self, group: &'a str) -> impl Iterator<Item = &'a Zone> + 'a {
        self.berths().filter(move |z| z.compat_group == group)
    }

    pub fn has_group(&self, group: &str) -> bool {
        self.zones.values().any(|z| z.compat_group == group)
    }

    pub fn compat_group(&self, id: &ZoneId) -> Option<&str> {
        self.zones.get(id).map(|z| z.compat_group.as_str())
    }
}
