use std::collections::BTreeMap;

use chrono::NaiveDateTime;
use serde::Serialize;

use crate::model::VesselId;

pub const DEFAULT_DRIFT_KMH: f64 = 100.0;
pub const DEFAULT_GAP_HOURS: f64 = 6.0;

const EARTH_RADIUS_KM: f64 = 6371.0088;

/// One raw position report.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionFix {
    pub vessel_id: VesselId,
    pub time: NaiveDateTime,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnomalyKind {
    Drift,
    Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyFlag {
    pub vessel_id: VesselId,
    /// Index into the input slice of the offending fix.
    pub index: usize,
    pub kind: AnomalyKind,
    pub detail: String,
}

fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

fn implied_kmh(a: &PositionFix, b: &PositionFix) -> f64 {
    let km = haversine_km(a.lat, a.lon, b.lat, b.lon);
    let hours = (b.time - a.time).num_seconds() as f64 / 3600.0;
    if hours <= 0.0 {
        if km > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        km / hours
    }
}

/// Flags position fixes that look like drift (implied speed above
/// `drift_kmh` km/h) or follow a reporting gap longer than `gap_hours`.
///
/// Detection only; nothing is corrected. Fixes must be time-sorted per
/// vessel; vessels may be interleaved. Each fix gets at most one flag.
/// Speeds are measured against the last accepted fix, so an isolated
/// outlier raises one flag, and two consecutive outliers that agree with
/// each other are taken as a genuine relocation after the first flag. No
/// speed check is made across a gap.
pub fn flag_anomalies(fixes: &[PositionFix], drift_kmh: f64, gap_hours: f64) -> Vec<AnomalyFlag> {
    let mut by_vessel: BTreeMap<VesselId, Vec<usize>> = BTreeMap::new();
    for (i, f) in fixes.iter().enumerate() {
        by_vessel.entry(f.vessel_id).or_default().push(i);
    }

    let gap_seconds = gap_hours * 3600.0;
    let mut flags = Vec::new();
    for (vessel_id, idx) in by_vessel {
        let mut reference = idx[0];
        let mut pending_outlier: Option<usize> = None;
        for w in idx.windows(2) {
            let (prev, cur) = (w[0], w[1]);
            let elapsed = (fixes[cur].time - fixes[prev].time).num_seconds() as f64;
            if elapsed > gap_seconds {
                flags.push(AnomalyFlag {
                    vessel_id,
                    index: cur,
                    kind: AnomalyKind::Gap,
                    detail: format!("{:.2} h without reports", elapsed / 3600.0),
                });
                reference = cur;
                pending_outlier = None;
                continue;
            }
            let speed = implied_kmh(&fixes[reference], &fixes[cur]);
            if speed <= drift_kmh {
                reference = cur;
                pending_outlier = None;
                continue;
            }
            if let Some(outlier) = pending_outlier {
                if implied_kmh(&fixes[outlier], &fixes[cur]) <= drift_kmh {
                    reference = cur;
                    pending_outlier = None;
                    continue;
                }
            }
            flags.push(AnomalyFlag {
                vessel_id,
                index: cur,
                kind: AnomalyKind::Drift,
                detail: format!("implied speed {speed:.1} km/h"),
            });
            pending_outlier = Some(cur);
        }
    }
    flags.sort_by_key(|f| f.index);
    flags
}
