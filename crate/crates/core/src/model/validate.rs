use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Interval, Minutes, PortTopology, ScheduleSet, VesselId, ZoneId, ZoneKind};

/// Location of a record inside a [`ScheduleSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RecordRef {
    pub portcall: usize,
    pub activity: usize,
    pub vessel_id: VesselId,
}

impl fmt::Display for RecordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vessel {} (portcall {}, activity {})",
            self.vessel_id, self.portcall, self.activity
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    EmptyPortcall {
        portcall: usize,
    },
    VesselMismatch {
        at: RecordRef,
        expected: VesselId,
    },
    UnknownZone {
        at: RecordRef,
        zone_id: ZoneId,
    },
    ZoneKindMismatch {
        at: RecordRef,
        zone_id: ZoneId,
        recorded: ZoneKind,
        topology: ZoneKind,
    },
    UnsortedPortcall {
        at: RecordRef,
    },
    OutOfWindow {
        at: RecordRef,
    },
    BerthOverlap(BerthOverlap),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPortcall { portcall } => write!(f, "portcall {portcall} is empty"),
            Violation::VesselMismatch { at, expected } => {
                write!(f, "{at}: record belongs to a portcall of vessel {expected}")
            }
            Violation::UnknownZone { at, zone_id } => write!(f, "{at}: unknown zone {zone_id}"),
            Violation::ZoneKindMismatch {
                at,
                zone_id,
                recorded,
                topology,
            } => write!(
                f,
                "{at}: zone {zone_id} recorded as {recorded} but topology says {topology}"
            ),
            Violation::UnsortedPortcall { at } => {
                write!(f, "{at}: starts before the previous stay of the vessel ends")
            }
            Violation::OutOfWindow { at } => write!(f, "{at}: outside the observation window"),
            Violation::BerthOverlap(o) => write!(
                f,
                "berth {}: {} overlaps {} by {}",
                o.zone_id, o.first, o.second, o.overlap
            ),
        }
    }
}

/// Two stays sharing a berth at the same time. `first` starts no later than `second`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BerthOverlap {
    pub zone_id: ZoneId,
    pub first: RecordRef,
    pub second: RecordRef,
    pub overlap: Minutes,
}

/// Every pair of berth stays that share a berth and overlap in time.
pub fn berth_overlaps(set: &ScheduleSet) -> Vec<BerthOverlap> {
    let mut by_berth: BTreeMap<&ZoneId, Vec<(Interval, RecordRef)>> = BTreeMap::new();
    for (pi, p) in set.portcalls.iter().enumerate() {
        for (ai, a) in p.activities.iter().enumerate() {
            if a.zone_kind == ZoneKind::Berth {
                by_berth.entry(&a.zone_id).or_default().push((
                    a.interval,
                    RecordRef {
                        portcall: pi,
                        activity: ai,
                        vessel_id: a.vessel_id,
                    },
                ));
            }
        }
    }
    let mut out = Vec::new();
    for (zone_id, mut stays) in by_berth {
        stays.sort_by_key(|(iv, r)| (iv.start(), iv.end(), *r));
        for i in 0..stays.len() {
            let (a, ra) = stays[i];
            for &(b, rb) in &stays[i + 1..] {
                if b.start() >= a.end() {
                    break;
                }
                out.push(BerthOverlap {
                    zone_id: zone_id.clone(),
                    first: ra,
                    second: rb,
                    overlap: a.overlap_length(&b),
                });
            }
        }
    }
    out
}

/// Lists every violated schedule invariant; empty means the set is feasible.
pub fn validate(set: &ScheduleSet, topo: &PortTopology) -> Vec<Violation> {
    let mut out = Vec::new();
    for (pi, p) in set.portcalls.iter().enumerate() {
        if p.activities.is_empty() {
            out.push(Violation::EmptyPortcall { portcall: pi });
            continue;
        }
        for (ai, a) in p.activities.iter().enumerate() {
            let at = RecordRef {
                portcall: pi,
                activity: ai,
                vessel_id: a.vessel_id,
            };
            if a.vessel_id != p.vessel_id {
                out.push(Violation::VesselMismatch {
                    at,
                    expected: p.vessel_id,
                });
            }
            match topo.zone(&a.zone_id) {
                None => out.push(Violation::UnknownZone {
                    at,
                    zone_id: a.zone_id.clone(),
                }),
                Some(z) if z.kind != a.zone_kind => out.push(Violation::ZoneKindMismatch {
                    at,
                    zone_id: a.zone_id.clone(),
                    recorded: a.zone_kind,
                    topology: z.kind,
                }),
                Some(_) => {}
            }
            if ai > 0 && a.start() < p.activities[ai - 1].end() {
                out.push(Violation::UnsortedPortcall { at });
            }
            if a.start() < set.window_start || a.end() > set.window_end {
                out.push(Violation::OutOfWindow { at });
            }
        }
    }
    out.extend(berth_overlaps(set).into_iter().map(Violation::BerthOverlap));
    out
}
