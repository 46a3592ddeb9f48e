use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::model::{
    berth_overlaps, ActivityRecord, Fixedness, Interval, Minutes, PortTopology, RecordRef, ScheduleSet, Timestamp,
    VesselId, ZoneId, ZoneKind,
};

use super::HeuristicError;

/// A same-berth overlap left in the optimized schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualConflict {
    pub zone_id: ZoneId,
    pub first: RecordRef,
    pub second: RecordRef,
    pub overlap_hours: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounters {
    pub step1_visits: usize,
    /// Overlap tests between two stays of the same berth.
    pub step2_comparisons: usize,
    /// Berth scans made while looking for a relocation target.
    pub availability_probes: usize,
    pub passes: usize,
}

/// Lexicographically smallest berth of `compat_group`, other than
/// `exclude`, with no stay in `set` overlapping `interval`.
pub fn find_available_berth(
    set: &ScheduleSet,
    topo: &PortTopology,
    interval: &Interval,
    compat_group: &str,
    exclude: &ZoneId,
) -> Result<Option<ZoneId>, HeuristicError> {
    if !topo.has_group(compat_group) {
        return Err(HeuristicError::UnknownGroup(compat_group.to_string()));
    }
    let busy: HashSet<&ZoneId> = set
        .activities()
        .filter(|a| a.is_berth() && a.interval.overlaps(interval))
        .map(|a| &a.zone_id)
        .collect();
    Ok(topo
        .berths_in_group(compat_group)
        .map(|z| &z.zone_id)
        .find(|id| *id != exclude && !busy.contains(id))
        .cloned())
}

/// Per-berth conflict resolution on a Step-1 schedule, using the input
/// itself as the origin that moved stays may fall back to.
///
/// `max_passes` defaults to the number of activities.
pub fn step2_deconflict(
    set: &ScheduleSet,
    topo: &PortTopology,
    tau: Minutes,
    max_passes: Option<usize>,
) -> (ScheduleSet, Vec<ResidualConflict>, OpCounters) {
    deconflict(set, set, topo, tau, max_passes)
}

/// Like [`step2_deconflict`] with an explicit origin schedule of the same
/// shape as `set` (normally the pre-Step-1 baseline).
pub(crate) fn deconflict(
    set: &ScheduleSet,
    origin: &ScheduleSet,
    topo: &PortTopology,
    tau: Minutes,
    max_passes: Option<usize>,
) -> (ScheduleSet, Vec<ResidualConflict>, OpCounters) {
    let max_passes = max_passes.unwrap_or(set.activity_count()).max(1);
    let mut d = Deconflictor::new(set.clone(), origin, topo, tau);
    while d.counters.passes < max_passes {
        d.counters.passes += 1;
        if !d.pass() {
            break;
        }
    }
    let mut out = d.set;
    out.widen_window_to_fit();
    let residuals = berth_overlaps(&out)
        .into_iter()
        .map(|o| ResidualConflict {
            zone_id: o.zone_id,
            first: o.first,
            second: o.second,
            overlap_hours: o.overlap.hours(),
        })
        .collect();
    (out, residuals, d.counters)
}

type Key = (usize, usize);
type WorkKey = (Timestamp, VesselId, usize, usize);

struct Deconflictor<'a> {
    set: ScheduleSet,
    origin: &'a ScheduleSet,
    topo: &'a PortTopology,
    tau: Minutes,
    occupancy: BTreeMap<ZoneId, BTreeSet<Key>>,
    /// Stays returned to their origin berth; never relocated again.
    pinned: HashSet<Key>,
    counters: OpCounters,
}

impl<'a> Deconflictor<'a> {
    fn new(set: ScheduleSet, origin: &'a ScheduleSet, topo: &'a PortTopology, tau: Minutes) -> Self {
        let mut occupancy: BTreeMap<ZoneId, BTreeSet<Key>> = BTreeMap::new();
        for (pi, p) in set.portcalls.iter().enumerate() {
            for (ai, a) in p.activities.iter().enumerate() {
                if a.is_berth() {
                    occupancy.entry(a.zone_id.clone()).or_default().insert((pi, ai));
                }
            }
        }
        Deconflictor {
            set,
            origin,
            topo,
            tau,
            occupancy,
            pinned: HashSet::new(),
            counters: OpCounters::default(),
        }
    }

    fn rec(&self, k: Key) -> &ActivityRecord {
        &self.set.portcalls[k.0].activities[k.1]
    }

    fn rec_mut(&mut self, k: Key) -> &mut ActivityRecord {
        &mut self.set.portcalls[k.0].activities[k.1]
    }

    fn work_key(&self, k: Key) -> WorkKey {
        let a = self.rec(k);
        (a.start(), a.vessel_id, k.0, k.1)
    }

    /// One sweep over every berth followed by the vessel repair. Returns
    /// whether anything changed.
    fn pass(&mut self) -> bool {
        let berths: Vec<ZoneId> = self.occupancy.keys().cloned().collect();
        let mut changed = false;
        for zone in berths {
            changed |= self.sweep(&zone);
        }
        changed |= self.repair();
        changed
    }

    /// Resolves overlaps on one berth, taking stays in start order as of
    /// the beginning of the sweep. A delayed stay keeps its turn.
    fn sweep(&mut self, zone: &ZoneId) -> bool {
        let Some(members) = self.occupancy.get(zone) else {
            return false;
        };
        let mut order: Vec<WorkKey> = members.iter().map(|&k| self.work_key(k)).collect();
        order.sort_unstable();
        let mut queue: VecDeque<Key> = order.into_iter().map(|w| (w.2, w.3)).collect();
        // kept stays ordered by start
        let mut timeline: BTreeSet<WorkKey> = BTreeSet::new();
        let mut tolerated_overlap = false;
        let mut changed = false;

        while let Some(cur) = queue.pop_front() {
            loop {
                let Some(prev_item) = self.find_overlap(&timeline, cur, tolerated_overlap) else {
                    timeline.insert(self.work_key(cur));
                    break;
                };
                let prev: Key = (prev_item.2, prev_item.3);
                changed = true;
                let (p, c) = (self.rec(prev).clone(), self.rec(cur).clone());

                if c.flag_temporal.is_flexible() && self.can_delay(cur, p.end() + self.tau) {
                    self.delay(cur, p.end() + self.tau);
                    continue;
                }
                if self.relocatable(prev) {
                    if let Some(to) = self.available(&p.interval, &p.zone_id) {
                        timeline.remove(&prev_item);
                        self.relocate(prev, &to);
                        continue;
                    }
                }
                if self.relocatable(cur) {
                    if let Some(to) = self.available(&c.interval, &c.zone_id) {
                        self.relocate(cur, &to);
                        break;
                    }
                }
                if p.flag_temporal.is_flexible() && self.can_delay(prev, c.end() + self.tau) {
                    timeline.remove(&prev_item);
                    self.delay(prev, c.end() + self.tau);
                    queue.push_front(prev);
                    continue;
                }
                if let Some(home) = self.displaced_from(cur) {
                    self.restore(cur, &home);
                    break;
                }
                if let Some(home) = self.displaced_from(prev) {
                    timeline.remove(&prev_item);
                    self.restore(prev, &home);
                    continue;
                }
                timeline.insert(self.work_key(cur));
                tolerated_overlap = true;
                break;
            }
        }
        changed
    }

    /// The latest-starting kept stay that overlaps `cur`.
    fn find_overlap(&mut self, timeline: &BTreeSet<WorkKey>, cur: Key, exhaustive: bool) -> Option<WorkKey> {
        let c = self.rec(cur).interval;
        let bound = (c.end(), VesselId(0), 0, 0);
        for item in timeline.range(..bound).rev() {
            self.counters.step2_comparisons += 1;
            let k = self.rec((item.2, item.3)).interval;
            if k.overlaps(&c) {
                return Some(*item);
            }
            if !exhaustive && k.end() <= c.start() {
                return None;
            }
        }
        None
    }

    /// Whether moving stay `k` to `start` keeps its own portcall free of
    /// self-overlap once later flexible stays are pushed along.
    fn can_delay(&self, k: Key, start: Timestamp) -> bool {
        let acts = &self.set.portcalls[k.0].activities;
        if acts[k.1].flag_temporal.is_fixed() {
            return false;
        }
        let mut end = start + acts[k.1].duration();
        for next in &acts[k.1 + 1..] {
            if next.flag_temporal.is_fixed() {
                return end <= next.start();
            }
            let s = next.start().max(end + self.tau);
            end = s + next.duration();
        }
        true
    }

    fn delay(&mut self, k: Key, start: Timestamp) {
        let a = self.rec_mut(k);
        a.interval = a.interval.starting_at(start);
    }

    fn relocatable(&self, k: Key) -> bool {
        self.rec(k).flag_spatial == Fixedness::Flexible && !self.pinned.contains(&k)
    }

    fn available(&mut self, interval: &Interval, exclude: &ZoneId) -> Option<ZoneId> {
        let group = self.topo.compat_group(exclude)?;
        for z in self.topo.berths_in_group(group) {
            if &z.zone_id == exclude {
                continue;
            }
            self.counters.availability_probes += 1;
            let free = match self.occupancy.get(&z.zone_id) {
                None => true,
                Some(stays) => stays
                    .iter()
                    .all(|&k| !self.set.portcalls[k.0].activities[k.1].interval.overlaps(interval)),
            };
            if free {
                return Some(z.zone_id.clone());
            }
        }
        None
    }

    fn move_to(&mut self, k: Key, to: &ZoneId, position: crate::model::GeoPoint) {
        let from = self.rec(k).zone_id.clone();
        if let Some(stays) = self.occupancy.get_mut(&from) {
            stays.remove(&k);
        }
        self.occupancy.entry(to.clone()).or_default().insert(k);
        let a = self.rec_mut(k);
        a.zone_id = to.clone();
        a.position = position;
    }

    fn relocate(&mut self, k: Key, to: &ZoneId) {
        let position = self.topo.zone(to).map(|z| z.position).unwrap_or(self.rec(k).position);
        self.move_to(k, to, position);
    }

    /// The origin zone of a spatially flexible stay that has been moved.
    fn displaced_from(&self, k: Key) -> Option<ZoneId> {
        let a = self.rec(k);
        let o = &self.origin.portcalls[k.0].activities[k.1];
        (a.flag_spatial.is_flexible() && o.zone_kind == ZoneKind::Berth && a.zone_id != o.zone_id)
            .then(|| o.zone_id.clone())
    }

    fn restore(&mut self, k: Key, home: &ZoneId) {
        let position = self.origin.portcalls[k.0].activities[k.1].position;
        self.move_to(k, home, position);
        self.pinned.insert(k);
    }

    /// Pushes each temporally flexible stay to at least `tau` after its
    /// predecessor within the portcall.
    fn repair(&mut self) -> bool {
        let tau = self.tau;
        let mut changed = false;
        for p in &mut self.set.portcalls {
            for i in 1..p.activities.len() {
                let ready = p.activities[i - 1].end() + tau;
                let cur = &mut p.activities[i];
                if cur.flag_temporal.is_flexible() && cur.start() < ready {
                    cur.interval = cur.interval.starting_at(ready);
                    changed = true;
                }
            }
        }
        changed
    }
}
