//! Exhaustive optimizer for tiny instances.
//!
//! Every berth assignment allowed by the spatial flags and compat groups is
//! combined with every service order on each berth. For each such candidate
//! the stay times are chosen optimally: the timing problem has only
//! difference constraints, so its dual is an uncapacitated flow in which
//! each multi-stay portcall sends one unit from its first stay to some last
//! stay (or to the fixed time origin). That flow is solved by brute-force
//! assignment over longest-path weights, and the primal times follow from
//! complementary slackness.
//!
//! Stays on one berth may not overlap; there is no buffer between
//! different vessels. Within a portcall a flexible stay starts at least
//! `tau` after its predecessor ends; a fixed one only has to start after it.
//! Flexible first stays never start before their recorded start. The
//! objective is the mean turnaround over portcalls.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    ActivityRecord, Fixedness, GeoPoint, Interval, Minutes, PortTopology, Portcall, ScheduleSet, Timestamp, VesselId,
    Zone, ZoneId, ZoneKind,
};

pub const HARD_MAX_VESSELS: usize = 4;
pub const HARD_MAX_BERTHS: usize = 3;
pub const HARD_MAX_ACTIVITIES: usize = 2;
pub const MAX_CANDIDATES: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance limits ({vessels}, {berths}, {activities}) out of range")]
    Limits {
        vessels: usize,
        berths: usize,
        activities: usize,
    },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("berth stay at {0} is not a berth of the topology")]
    UnknownBerth(ZoneId),
    #[error("infeasible")]
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstanceLimits {
    max_vessels: usize,
    max_berths: usize,
    max_activities_per_vessel: usize,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits {
            max_vessels: 3,
            max_berths: 2,
            max_activities_per_vessel: 2,
        }
    }
}

/// Largest possible candidate count: every stay a flexible berth stay.
fn candidate_bound(vessels: usize, berths: usize, activities: usize) -> u128 {
    let k = (vessels * activities) as u128;
    let factorial: u128 = (1..=k).product();
    let b = berths as u128;
    // C(k + b - 1, b - 1)
    let mut binom: u128 = 1;
    for i in 1..b {
        binom = binom * (k + i) / i;
    }
    factorial * binom
}

impl InstanceLimits {
    pub fn new(max_vessels: usize, max_berths: usize, max_activities_per_vessel: usize) -> Result<Self, OracleError> {
        let err = OracleError::Limits {
            vessels: max_vessels,
            berths: max_berths,
            activities: max_activities_per_vessel,
        };
        if !(1..=HARD_MAX_VESSELS).contains(&max_vessels)
            || !(1..=HARD_MAX_BERTHS).contains(&max_berths)
            || !(1..=HARD_MAX_ACTIVITIES).contains(&max_activities_per_vessel)
            || candidate_bound(max_vessels, max_berths, max_activities_per_vessel) >= MAX_CANDIDATES
        {
            return Err(err);
        }
        Ok(InstanceLimits {
            max_vessels,
            max_berths,
            max_activities_per_vessel,
        })
    }

    pub fn max_vessels(&self) -> usize {
        self.max_vessels
    }

    pub fn max_berths(&self) -> usize {
        self.max_berths
    }

    pub fn max_activities_per_vessel(&self) -> usize {
        self.max_activities_per_vessel
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Mean portcall turnaround of the best candidate, hours.
    pub mean_turnaround_hours: f64,
    pub total_turnaround: Minutes,
    pub schedule: ScheduleSet,
    /// Candidates (assignment plus berth orders) examined.
    pub candidates: u64,
}

type Key = (usize, usize);

struct Instance<'a> {
    set: &'a ScheduleSet,
    berths: Vec<&'a Zone>,
    /// Node index of each activity; node 0 is the time origin.
    node: HashMap<Key, usize>,
    keys: Vec<Key>,
    berth_stays: Vec<Key>,
    allowed: Vec<Vec<usize>>,
    tau: i64,
}

const NEG: i64 = i64::MIN / 4;

fn allowed_berths(a: &ActivityRecord, berths: &[&Zone], topo: &PortTopology) -> Result<Vec<usize>, OracleError> {
    let here = berths
        .iter()
        .position(|z| z.zone_id == a.zone_id)
        .ok_or_else(|| OracleError::UnknownBerth(a.zone_id.clone()))?;
    if a.flag_spatial.is_fixed() {
        return Ok(vec![here]);
    }
    let group = topo.compat_group(&a.zone_id);
    Ok((0..berths.len())
        .filter(|&i| Some(berths[i].compat_group.as_str()) == group)
        .collect())
}

/// Exact number of (assignment, order) candidates.
fn count_candidates(allowed: &[Vec<usize>], n_berths: usize) -> u128 {
    let mut states: HashMap<Vec<usize>, u128> = HashMap::new();
    states.insert(vec![0; n_berths], 1);
    for options in allowed {
        let mut next: HashMap<Vec<usize>, u128> = HashMap::new();
        for (counts, mult) in &states {
            for &b in options {
                let mut c = counts.clone();
                c[b] += 1;
                *next.entry(c).or_default() += mult;
            }
        }
        states = next;
    }
    states
        .into_iter()
        .map(|(counts, mult)| {
            mult * counts
                .iter()
                .map(|&c| (1..=c as u128).product::<u128>())
                .product::<u128>()
        })
        .sum()
}

/// Minimal mean turnaround over all berth assignments, berth orders and
/// stay times.
pub fn brute_force_optimum(
    set: &ScheduleSet,
    topo: &PortTopology,
    tau: Minutes,
) -> Result<OracleSolution, OracleError> {
    let berths: Vec<&Zone> = topo.berths().collect();
    if set.portcalls.len() > HARD_MAX_VESSELS {
        return Err(OracleError::TooLarge(format!("{} portcalls", set.portcalls.len())));
    }
    if berths.len() > HARD_MAX_BERTHS {
        return Err(OracleError::TooLarge(format!("{} berths", berths.len())));
    }
    if let Some(p) = set.portcalls.iter().find(|p| p.activities.len() > HARD_MAX_ACTIVITIES) {
        return Err(OracleError::TooLarge(format!(
            "vessel {} has {} activities",
            p.vessel_id,
            p.activities.len()
        )));
    }
    if set.is_empty() {
        return Ok(OracleSolution {
            mean_turnaround_hours: 0.0,
            total_turnaround: Minutes::ZERO,
            schedule: set.clone(),
            candidates: 0,
        });
    }

    let mut node = HashMap::new();
    let mut keys = Vec::new();
    let mut berth_stays = Vec::new();
    let mut allowed = Vec::new();
    for (pi, p) in set.portcalls.iter().enumerate() {
        for (ai, a) in p.activities.iter().enumerate() {
            keys.push((pi, ai));
            node.insert((pi, ai), keys.len());
            if a.zone_kind == ZoneKind::Berth {
                berth_stays.push((pi, ai));
                allowed.push(allowed_berths(a, &berths, topo)?);
            }
        }
    }
    let total = count_candidates(&allowed, berths.len());
    if total >= MAX_CANDIDATES {
        return Err(OracleError::TooLarge(format!("{total} candidates")));
    }

    let inst = Instance {
        set,
        berths,
        node,
        keys,
        berth_stays,
        allowed,
        tau: tau.get(),
    };
    let mut search = Search {
        inst: &inst,
        queues: vec![Vec::new(); inst.berths.len()],
        best: None,
        candidates: 0,
    };
    search.descend(0);
    let candidates = search.candidates;
    let (objective, starts, queues) = search.best.ok_or(OracleError::Infeasible)?;
    let schedule = inst.materialize(&starts, &queues);
    Ok(OracleSolution {
        mean_turnaround_hours: Minutes::new(objective).hours() / set.portcalls.len() as f64,
        total_turnaround: Minutes::new(objective),
        schedule,
        candidates,
    })
}

struct Search<'a> {
    inst: &'a Instance<'a>,
    queues: Vec<Vec<Key>>,
    best: Option<(i64, Vec<i64>, Vec<Vec<Key>>)>,
    candidates: u64,
}

impl Search<'_> {
    fn descend(&mut self, i: usize) {
        if i == self.inst.berth_stays.len() {
            self.candidates += 1;
            if let Some((objective, starts)) = self.inst.evaluate(&self.queues) {
                if self.best.as_ref().is_none_or(|b| objective < b.0) {
                    self.best = Some((objective, starts, self.queues.clone()));
                }
            }
            return;
        }
        let stay = self.inst.berth_stays[i];
        for bi in 0..self.inst.allowed[i].len() {
            let b = self.inst.allowed[i][bi];
            for pos in 0..=self.queues[b].len() {
                self.queues[b].insert(pos, stay);
                self.descend(i + 1);
                self.queues[b].remove(pos);
            }
        }
    }
}

impl Instance<'_> {
    fn rec(&self, k: Key) -> &ActivityRecord {
        &self.set.portcalls[k.0].activities[k.1]
    }

    fn minutes(t: Timestamp) -> i64 {
        t.minutes()
    }

    /// Constraint edges `s_to >= s_from + weight`, node 0 being time zero.
    fn edges(&self, queues: &[Vec<Key>]) -> Vec<(usize, usize, i64)> {
        let mut e = Vec::new();
        for (pi, p) in self.set.portcalls.iter().enumerate() {
            for (ai, a) in p.activities.iter().enumerate() {
                let n = self.node[&(pi, ai)];
                let s0 = Self::minutes(a.start());
                if a.flag_temporal.is_fixed() {
                    e.push((0, n, s0));
                    e.push((n, 0, -s0));
                } else if ai == 0 {
                    e.push((0, n, s0));
                }
                if ai > 0 {
                    let prev = &p.activities[ai - 1];
                    let lag = if a.flag_temporal.is_flexible() { self.tau } else { 0 };
                    e.push((self.node[&(pi, ai - 1)], n, prev.duration().get() + lag));
                }
            }
        }
        for q in queues {
            for w in q.windows(2) {
                e.push((self.node[&w[0]], self.node[&w[1]], self.rec(w[0]).duration().get()));
            }
        }
        e
    }

    /// Optimal total turnaround and start times for one candidate, or
    /// `None` when its constraints are contradictory.
    fn evaluate(&self, queues: &[Vec<Key>]) -> Option<(i64, Vec<i64>)> {
        let n = self.keys.len() + 1;
        let edges = self.edges(queues);
        let mut dist = vec![vec![NEG; n]; n];
        let mut next = vec![vec![usize::MAX; n]; n];
        for (i, row) in dist.iter_mut().enumerate() {
            row[i] = 0;
            next[i][i] = i;
        }
        for &(a, b, w) in &edges {
            if w > dist[a][b] {
                dist[a][b] = w;
                next[a][b] = b;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if dist[i][k] == NEG {
                    continue;
                }
                for j in 0..n {
                    if dist[k][j] == NEG {
                        continue;
                    }
                    let via = dist[i][k] + dist[k][j];
                    if via > dist[i][j] {
                        dist[i][j] = via;
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
        if (0..n).any(|i| dist[i][i] > 0) {
            return None;
        }

        // portcalls with more than one stay contribute s_last - s_first
        let mut sources = Vec::new();
        let mut sinks = Vec::new();
        let mut constant = 0;
        for (pi, p) in self.set.portcalls.iter().enumerate() {
            let last = p.activities.len() - 1;
            constant += p.activities[last].duration().get();
            if last > 0 {
                sources.push(self.node[&(pi, 0)]);
                sinks.push(self.node[&(pi, last)]);
            }
        }
        let mut best = NEG;
        let mut best_pairs = Vec::new();
        let mut pairs = Vec::new();
        let mut used = vec![false; sinks.len()];
        assign(
            &dist,
            &sources,
            &sinks,
            0,
            0,
            &mut used,
            &mut pairs,
            &mut best,
            &mut best_pairs,
        );
        if best == NEG {
            return None;
        }

        // complementary slackness: edges on the flow paths are tight
        let mut tight = edges.clone();
        for &(from, to) in &best_pairs {
            let mut cur = from;
            while cur != to {
                let step = next[cur][to];
                let w = edges
                    .iter()
                    .filter(|e| e.0 == cur && e.1 == step)
                    .map(|e| e.2)
                    .max()
                    .expect("path follows an edge");
                tight.push((step, cur, -w));
                cur = step;
            }
        }
        let starts = longest_from_origin(n, &tight)?;
        let objective: i64 = constant
            + sources
                .iter()
                .zip(&sinks)
                .map(|(&f, &l)| starts[l] - starts[f])
                .sum::<i64>();
        debug_assert_eq!(objective, constant + best);
        Some((objective, starts))
    }

    fn materialize(&self, starts: &[i64], queues: &[Vec<Key>]) -> ScheduleSet {
        let mut zone_of: HashMap<Key, usize> = HashMap::new();
        for (b, q) in queues.iter().enumerate() {
            for &k in q {
                zone_of.insert(k, b);
            }
        }
        let mut out = self.set.clone();
        for (i, &k) in self.keys.iter().enumerate() {
            let a = &mut out.portcalls[k.0].activities[k.1];
            a.interval = a.interval.starting_at(Timestamp::from_minutes(starts[i + 1]));
            if let Some(&b) = zone_of.get(&k) {
                let zone = self.berths[b];
                if zone.zone_id != a.zone_id {
                    a.zone_id = zone.zone_id.clone();
                    a.position = zone.position;
                }
            }
        }
        out.widen_window_to_fit();
        out
    }
}

/// Max-weight assignment of each source to a distinct sink or to the
/// origin; sinks left over are fed from the origin.
#[allow(clippy::too_many_arguments)]
fn assign(
    dist: &[Vec<i64>],
    sources: &[usize],
    sinks: &[usize],
    i: usize,
    acc: i64,
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    best: &mut i64,
    best_pairs: &mut Vec<(usize, usize)>,
) {
    if i == sources.len() {
        let mut total = acc;
        let mut all = pairs.clone();
        for (j, &t) in sinks.iter().enumerate() {
            if !used[j] {
                if dist[0][t] == NEG {
                    return;
                }
                total += dist[0][t];
                all.push((0, t));
            }
        }
        if total > *best {
            *best = total;
            *best_pairs = all;
        }
        return;
    }
    let s = sources[i];
    if dist[s][0] != NEG {
        pairs.push((s, 0));
        assign(
            dist,
            sources,
            sinks,
            i + 1,
            acc + dist[s][0],
            used,
            pairs,
            best,
            best_pairs,
        );
        pairs.pop();
    }
    for j in 0..sinks.len() {
        if used[j] || dist[s][sinks[j]] == NEG {
            continue;
        }
        used[j] = true;
        pairs.push((s, sinks[j]));
        assign(
            dist,
            sources,
            sinks,
            i + 1,
            acc + dist[s][sinks[j]],
            used,
            pairs,
            best,
            best_pairs,
        );
        pairs.pop();
        used[j] = false;
    }
}

/// Earliest times satisfying every edge, or `None` on a positive cycle.
fn longest_from_origin(n: usize, edges: &[(usize, usize, i64)]) -> Option<Vec<i64>> {
    let mut d = vec![NEG; n];
    d[0] = 0;
    for _ in 0..n {
        let mut changed = false;
        for &(a, b, w) in edges {
            if d[a] != NEG && d[a] + w > d[b] {
                d[b] = d[a] + w;
                changed = true;
            }
        }
        if !changed {
            return (d[0] == 0).then_some(d);
        }
    }
    None
}

const BASE_DATE: &str = "2017-05-01 00:00:00";

/// A deterministic stream of small valid first-come-first-served instances
/// within `limits`. One in five has every flag fixed, one in five every
/// flag flexible; the rest draw flags per vessel.
pub fn enumerate_instances(
    limits: InstanceLimits,
    seed: u64,
    count: usize,
) -> impl Iterator<Item = (ScheduleSet, PortTopology)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| random_instance(&limits, &mut rng))
}

fn random_instance(limits: &InstanceLimits, rng: &mut ChaCha8Rng) -> (ScheduleSet, PortTopology) {
    let base = Timestamp::parse(BASE_DATE).expect("valid literal");
    let n_vessels = rng.gen_range(1..=limits.max_vessels);
    let n_berths = rng.gen_range(1..=limits.max_berths);
    let split_groups = n_berths > 1 && rng.gen_bool(0.25);
    let pos = GeoPoint::from_micro(1_264_000, 103_820_000).expect("in range");

    let mut zones = vec![Zone {
        zone_id: ZoneId::new("A1"),
        kind: ZoneKind::Anchorage,
        position: pos,
        compat_group: "ANCH".into(),
    }];
    for b in 0..n_berths {
        zones.push(Zone {
            zone_id: ZoneId::new(format!("B{}", b + 1)),
            kind: ZoneKind::Berth,
            position: GeoPoint::from_micro(1_264_000 + 1000 * b as i32, 103_820_000).expect("in range"),
            compat_group: if split_groups && b % 2 == 1 { "G2" } else { "G1" }.into(),
        });
    }
    let topo = PortTopology::new(zones.clone()).expect("unique generated zones");

    let mode = rng.gen_range(0..5);
    let mut berth_free = vec![base; n_berths];
    let mut portcalls = Vec::with_capacity(n_vessels);
    let hours = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| Minutes::new(rng.gen_range(lo * 60..=hi * 60));
    for v in 0..n_vessels {
        let flag = |rng: &mut ChaCha8Rng| match mode {
            0 => Fixedness::Fixed,
            1 => Fixedness::Flexible,
            _ if rng.gen_bool(0.5) => Fixedness::Flexible,
            _ => Fixedness::Fixed,
        };
        let (t, s) = (flag(rng), flag(rng));
        let n_acts = rng.gen_range(1..=limits.max_activities_per_vessel);
        let mut ready = base + hours(rng, 0, 12);
        let mut acts = Vec::with_capacity(n_acts);
        for i in 0..n_acts {
            let zone = if i == 0 && n_acts > 1 && rng.gen_bool(0.5) {
                &zones[0]
            } else {
                &zones[1 + rng.gen_range(0..n_berths)]
            };
            let start = match zone.kind {
                ZoneKind::Anchorage => ready,
                ZoneKind::Berth => {
                    let b = zones[1..]
                        .iter()
                        .position(|z| z.zone_id == zone.zone_id)
                        .expect("berth");
                    ready.max(berth_free[b])
                }
            };
            let iv = Interval::new(start, start + hours(rng, 1, 8)).expect("positive duration");
            if zone.kind == ZoneKind::Berth {
                let b = zones[1..]
                    .iter()
                    .position(|z| z.zone_id == zone.zone_id)
                    .expect("berth");
                berth_free[b] = iv.end();
            }
            acts.push(ActivityRecord {
                vessel_id: VesselId(563_000_000 + v as u64),
                zone_kind: zone.kind,
                zone_id: zone.zone_id.clone(),
                position: zone.position,
                interval: iv,
                flag_temporal: t,
                flag_spatial: s,
            });
            ready = iv.end() + hours(rng, 0, 4);
        }
        portcalls.push(Portcall::new(acts).expect("generated in order"));
    }
    (ScheduleSet::from_portcalls(portcalls), topo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{turnaround, validate, Fixedness::*};

    const TAU: Minutes = Minutes::from_whole_hours(1);

    fn mean_hours(set: &ScheduleSet) -> f64 {
        set.portcalls
            .iter()
            .map(|p| turnaround(p).unwrap().hours())
            .sum::<f64>()
            / set.portcalls.len() as f64
    }

    #[test]
    fn limits_are_capped() {
        assert!(InstanceLimits::new(3, 2, 2).is_ok());
        assert!(InstanceLimits::new(4, 2, 2).is_ok());
        assert!(InstanceLimits::new(4, 3, 2).is_err());
        assert!(InstanceLimits::new(5, 1, 1).is_err());
        assert!(InstanceLimits::new(1, 4, 1).is_err());
        assert!(InstanceLimits::new(1, 1, 3).is_err());
        assert!(InstanceLimits::new(0, 1, 1).is_err());
        assert_eq!(candidate_bound(3, 2, 2), 720 * 7);
    }

    #[test]
    fn exact_candidate_count() {
        // two flexible stays over two berths: 2 assignments with both on one
        // berth (2 orders each) and 2 split assignments
        assert_eq!(count_candidates(&[vec![0, 1], vec![0, 1]], 2), 6);
        assert_eq!(count_candidates(&[vec![0], vec![0], vec![0]], 1), 6);
    }

    #[test]
    fn single_vessel_chain_is_analytic() {
        let set = ScheduleSet::from_portcalls(vec![Portcall::new(vec![
            record(1, ZoneKind::Anchorage, "A1", 0.0, 3.0, Flexible, Flexible),
            record(1, ZoneKind::Berth, "B1", 9.0, 14.0, Flexible, Flexible),
        ])
        .unwrap()]);
        let sol = brute_force_optimum(&set, &topology(&["B1"], &["A1"]), TAU).unwrap();
        assert_eq!(sol.mean_turnaround_hours, 3.0 + 5.0 + 1.0);
    }

    #[test]
    fn all_fixed_optimum_is_baseline() {
        let set = ScheduleSet::from_portcalls(vec![
            Portcall::new(vec![berth(1, "B1", 0.0, 4.0)]).unwrap(),
            Portcall::new(vec![anchorage(2, "A1", 0.0, 2.0), berth(2, "B1", 6.0, 9.0)]).unwrap(),
        ]);
        let sol = brute_force_optimum(&set, &topology(&["B1", "B2"], &["A1"]), TAU).unwrap();
        assert_eq!(sol.mean_turnaround_hours, mean_hours(&set));
        assert_eq!(sol.schedule, set);
    }

    #[test]
    fn two_flexible_vessels_share_one_berth() {
        let flex = |v, from: f64| {
            Portcall::new(vec![
                record(v, ZoneKind::Anchorage, "A1", from, from + 1.0, Flexible, Flexible),
                record(v, ZoneKind::Berth, "B1", from + 5.0, from + 7.0, Flexible, Flexible),
            ])
            .unwrap()
        };
        let set = ScheduleSet::from_portcalls(vec![flex(1, 0.0), flex(2, 0.0)]);
        let sol = brute_force_optimum(&set, &topology(&["B1"], &["A1"]), TAU).unwrap();
        // the second vessel to berth waits for the first; anchorage times
        // can absorb the wait, so each portcall is 1 + 1 + 2 hours
        assert_eq!(sol.mean_turnaround_hours, 4.0);
        assert!(validate(&sol.schedule, &topology(&["B1"], &["A1"])).is_empty());
        assert_eq!(sol.candidates, 2);
    }

    #[test]
    fn late_first_stay_shortens_turnaround() {
        // a fixed berth occupant forces waiting; a flexible first stay can
        // arrive late instead of early
        let set = ScheduleSet::from_portcalls(vec![
            Portcall::new(vec![berth(1, "B1", 0.0, 10.0)]).unwrap(),
            Portcall::new(vec![
                record(2, ZoneKind::Anchorage, "A1", 0.0, 2.0, Flexible, Fixed),
                record(2, ZoneKind::Berth, "B1", 10.0, 12.0, Flexible, Fixed),
            ])
            .unwrap(),
        ]);
        let sol = brute_force_optimum(&set, &topology(&["B1"], &["A1"]), TAU).unwrap();
        let v2 = &sol.schedule.portcalls[1];
        assert_eq!(turnaround(v2).unwrap(), Minutes::from_whole_hours(5));
        assert_eq!(v2.activities[1].start(), at_hours(10.0));
        assert_eq!(sol.mean_turnaround_hours, (10.0 + 5.0) / 2.0);
    }

    #[test]
    fn too_many_vessels_rejected() {
        let set = ScheduleSet::from_portcalls(
            (0..5)
                .map(|v| Portcall::new(vec![berth(v, "B1", v as f64 * 2.0, v as f64 * 2.0 + 1.0)]).unwrap())
                .collect(),
        );
        assert!(matches!(
            brute_force_optimum(&set, &topology(&["B1"], &[]), TAU),
            Err(OracleError::TooLarge(_))
        ));
    }

    #[test]
    fn contradictory_fixed_stays_are_infeasible() {
        let set = ScheduleSet::from_portcalls(vec![
            Portcall::new(vec![berth(1, "B1", 0.0, 10.0)]).unwrap(),
            Portcall::new(vec![berth(2, "B1", 5.0, 12.0)]).unwrap(),
        ]);
        assert_eq!(
            brute_force_optimum(&set, &topology(&["B1"], &[]), TAU),
            Err(OracleError::Infeasible)
        );
    }

    #[test]
    fn instance_stream_is_deterministic_and_valid() {
        let limits = InstanceLimits::default();
        assert_eq!(enumerate_instances(limits, 1, 0).count(), 0);
        let a: Vec<_> = enumerate_instances(limits, 7, 50).map(|(s, _)| s).collect();
        let b: Vec<_> = enumerate_instances(limits, 7, 50).map(|(s, _)| s).collect();
        assert_eq!(a, b);
        for (set, topo) in enumerate_instances(limits, 7, 500) {
            assert!(validate(&set, &topo).is_empty());
            assert!(set.portcalls.len() <= 3);
            assert!(set.portcalls.iter().all(|p| p.activities.len() <= 2));
            assert!(topo.berths().count() <= 2);
        }
    }
}
