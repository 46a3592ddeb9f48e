//! Schedule and topology CSV files, plus a drift/gap flagger for raw
//! position traces.
//!
//! Both CSV formats are canonical: `emit_*` output parses back to an equal
//! value, and re-emitting that value reproduces the text byte for byte.

mod anomaly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    ActivityRecord, Fixedness, GeoPoint, Interval, Minutes, ModelError, PortTopology, Portcall, ScheduleSet, Timestamp,
    VesselId, Zone, ZoneId, ZoneKind, MINUTES_PER_DAY,
};

pub use anomaly::{flag_anomalies, AnomalyFlag, AnomalyKind, PositionFix, DEFAULT_DRIFT_KMH, DEFAULT_GAP_HOURS};

pub const SCHEDULE_HEADER: &str = "mmsi,zone_kind,zone_id,lat,lon,start_utc,end_utc,flag_temporal,flag_spatial";
pub const TOPOLOGY_HEADER: &str = "zone_id,kind,lat,lon,compat_group";

const SCHEDULE_COLUMNS: [&str; 9] = [
    "mmsi",
    "zone_kind",
    "zone_id",
    "lat",
    "lon",
    "start_utc",
    "end_utc",
    "flag_temporal",
    "flag_spatial",
];
const TOPOLOGY_COLUMNS: [&str; 5] = ["zone_id", "kind", "lat", "lon", "compat_group"];

/// Idle time between consecutive stays of one vessel above which a new
/// portcall begins.
pub const PORTCALL_GAP: Minutes = Minutes::new(MINUTES_PER_DAY);

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line 1: missing header, expected `{expected}`")]
    MissingHeader { expected: &'static str },
    #[error("line 1: header mismatch, expected `{expected}`, found `{found}`")]
    BadHeader { expected: &'static str, found: String },
    #[error("line {line}, column {column}: {reason}")]
    Field {
        line: u64,
        column: &'static str,
        reason: String,
    },
    #[error("line {line}: {reason}")]
    NonMonotone { line: u64, reason: String },
    #[error("line {line}: malformed CSV: {source}")]
    Csv {
        line: u64,
        #[source]
        source: csv::Error,
    },
    #[error("topology: {0}")]
    Topology(#[from] ModelError),
}

impl IngestError {
    /// 1-based line the error points at.
    pub fn line(&self) -> Option<u64> {
        match self {
            IngestError::MissingHeader { .. } | IngestError::BadHeader { .. } => Some(1),
            IngestError::Field { line, .. } | IngestError::NonMonotone { line, .. } | IngestError::Csv { line, .. } => {
                Some(*line)
            }
            IngestError::Topology(_) => None,
        }
    }
}

/// A zone referenced by at least one record.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ZoneRef {
    pub zone_id: ZoneId,
    pub kind: ZoneKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSchedule {
    pub set: ScheduleSet,
    /// Distinct zones used by the records, ascending.
    pub zones: Vec<ZoneRef>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn check_header(rows: &mut csv::StringRecordsIter<'_, &[u8]>, expected: &'static str) -> Result<(), IngestError> {
    match rows.next() {
        None => Err(IngestError::MissingHeader { expected }),
        Some(Err(source)) => Err(IngestError::Csv { line: 1, source }),
        Some(Ok(rec)) => {
            let found = rec.iter().collect::<Vec<_>>().join(",");
            if found == expected {
                Ok(())
            } else {
                Err(IngestError::BadHeader { expected, found })
            }
        }
    }
}

struct Row<'a> {
    line: u64,
    record: &'a csv::StringRecord,
    columns: &'static [&'static str],
}

impl<'a> Row<'a> {
    fn field(&self, idx: usize) -> Result<&'a str, IngestError> {
        self.record.get(idx).ok_or_else(|| IngestError::Field {
            line: self.line,
            column: self.columns[idx],
            reason: "missing value".into(),
        })
    }

    fn parse<T, E: std::fmt::Display>(
        &self,
        idx: usize,
        f: impl FnOnce(&str) -> Result<T, E>,
    ) -> Result<T, IngestError> {
        let raw = self.field(idx)?;
        f(raw).map_err(|e| IngestError::Field {
            line: self.line,
            column: self.columns[idx],
            reason: e.to_string(),
        })
    }

    fn check_width(&self) -> Result<(), IngestError> {
        if self.record.len() > self.columns.len() {
            return Err(IngestError::Field {
                line: self.line,
                column: self.columns[self.columns.len() - 1],
                reason: format!("expected {} columns, found {}", self.columns.len(), self.record.len()),
            });
        }
        Ok(())
    }
}

fn zone_id_field(raw: &str) -> Result<ZoneId, String> {
    if raw.is_empty() {
        return Err("empty zone id".into());
    }
    if raw.chars().any(|c| c == ',' || c == '"' || c.is_whitespace()) {
        return Err(format!("zone id {raw:?} contains a separator, quote or whitespace"));
    }
    Ok(ZoneId::new(raw))
}

fn coordinates(row: &Row<'_>, lat_idx: usize) -> Result<GeoPoint, IngestError> {
    let lat = row.field(lat_idx)?;
    let lon = row.field(lat_idx + 1)?;
    // Probe each axis alone so the error names the right column.
    row.parse(lat_idx, |s| GeoPoint::parse(s, "0"))?;
    row.parse(lat_idx + 1, |s| GeoPoint::parse("0", s))?;
    row.parse(lat_idx, |_| GeoPoint::parse(lat, lon))
}

/// Parses a schedule CSV and groups its rows into portcalls.
///
/// Rows of one vessel are ordered by start; a gap longer than
/// [`PORTCALL_GAP`] between consecutive stays starts a new portcall. The
/// returned set is in canonical form (see [`ScheduleSet::from_portcalls`]).
pub fn parse_records(text: &str) -> Result<ParsedSchedule, IngestError> {
    let mut rdr = reader(text);
    let mut rows = rdr.records();
    check_header(&mut rows, SCHEDULE_HEADER)?;

    let mut by_vessel: BTreeMap<VesselId, Vec<(u64, ActivityRecord)>> = BTreeMap::new();
    let mut zones = BTreeSet::new();
    for result in rows {
        let record = result.map_err(|source| IngestError::Csv {
            line: source.position().map_or(0, |p| p.line()),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = Row {
            line,
            record: &record,
            columns: &SCHEDULE_COLUMNS,
        };
        row.check_width()?;
        let vessel_id = row.parse(0, |s| {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
                return Err(format!("expected an unsigned integer, found {s:?}"));
            }
            s.parse::<u64>().map(VesselId).map_err(|e| e.to_string())
        })?;
        let zone_kind: ZoneKind = row.parse(1, str::parse)?;
        let zone_id = row.parse(2, zone_id_field)?;
        let position = coordinates(&row, 3)?;
        let start = row.parse(5, Timestamp::parse)?;
        let end = row.parse(6, Timestamp::parse)?;
        let flag_temporal: Fixedness = row.parse(7, str::parse)?;
        let flag_spatial: Fixedness = row.parse(8, str::parse)?;
        let interval = Interval::new(start, end).map_err(|_| IngestError::NonMonotone {
            line,
            reason: format!("end {end} is not after start {start}"),
        })?;
        zones.insert(ZoneRef {
            zone_id: zone_id.clone(),
            kind: zone_kind,
        });
        by_vessel.entry(vessel_id).or_default().push((
            line,
            ActivityRecord {
                vessel_id,
                zone_kind,
                zone_id,
                position,
                interval,
                flag_temporal,
                flag_spatial,
            },
        ));
    }

    let mut portcalls = Vec::new();
    for (vessel_id, mut stays) in by_vessel {
        stays.sort_by_key(|(line, a)| (a.start(), *line));
        let mut current: Vec<ActivityRecord> = Vec::new();
        for (line, act) in stays {
            if let Some(prev) = current.last() {
                if act.start() < prev.end() {
                    return Err(IngestError::NonMonotone {
                        line,
                        reason: format!(
                            "stay of vessel {vessel_id} starting {} overlaps its previous stay ending {}",
                            act.start(),
                            prev.end()
                        ),
                    });
                }
                if act.start() - prev.end() > PORTCALL_GAP {
                    portcalls.push(Portcall {
                        vessel_id,
                        activities: std::mem::take(&mut current),
                    });
                }
            }
            current.push(act);
        }
        if !current.is_empty() {
            portcalls.push(Portcall {
                vessel_id,
                activities: current,
            });
        }
    }

    Ok(ParsedSchedule {
        set: ScheduleSet::from_portcalls(portcalls),
        zones: zones.into_iter().collect(),
    })
}

/// Writes the schedule CSV: header, then one row per stay in set order.
pub fn emit_records(set: &ScheduleSet) -> String {
    let mut out = String::with_capacity(64 * (set.activity_count() + 1));
    out.push_str(SCHEDULE_HEADER);
    out.push('\n');
    for a in set.activities() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            a.vessel_id,
            a.zone_kind,
            a.zone_id,
            a.position.lat_text(),
            a.position.lon_text(),
            a.start(),
            a.end(),
            a.flag_temporal.as_char(),
            a.flag_spatial.as_char(),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn parse_topology(text: &str) -> Result<PortTopology, IngestError> {
    let mut rdr = reader(text);
    let mut rows = rdr.records();
    check_header(&mut rows, TOPOLOGY_HEADER)?;
    let mut zones = Vec::new();
    let mut seen = BTreeSet::new();
    for result in rows {
        let record = result.map_err(|source| IngestError::Csv {
            line: source.position().map_or(0, |p| p.line()),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = Row {
            line,
            record: &record,
            columns: &TOPOLOGY_COLUMNS,
        };
        row.check_width()?;
        let zone_id = row.parse(0, zone_id_field)?;
        if !seen.insert(zone_id.clone()) {
            return Err(IngestError::Field {
                line,
                column: "zone_id",
                reason: format!("duplicate zone id {zone_id}"),
            });
        }
        let kind: ZoneKind = row.parse(1, str::parse)?;
        let position = coordinates(&row, 2)?;
        let compat_group = row.parse(4, |s| {
            if kind == ZoneKind::Berth && s.is_empty() {
                Err("berth needs a compat group")
            } else if s.contains(['"', ',']) {
                Err("compat group contains a separator or quote")
            } else {
                Ok(s.to_string())
            }
        })?;
        zones.push(Zone {
            zone_id,
            kind,
            position,
            compat_group,
        });
    }
    Ok(PortTopology::new(zones)?)
}

/// Zones in ascending id order.
pub fn emit_topology(topo: &PortTopology) -> String {
    let mut out = String::new();
    out.push_str(TOPOLOGY_HEADER);
    out.push('\n');
    for z in topo.zones() {
        writeln!(
            out,
            "{},{},{},{},{}",
            z.zone_id,
            z.kind,
            z.position.lat_text(),
            z.position.lon_text(),
            z.compat_group
        )
        .expect("writing to a String cannot fail");
    }
    out
}
