use crate::model::{Fixedness, Minutes, PortTopology, ScheduleSet};

/// Per-vessel compaction.
///
/// Inside each portcall, every activity after the first that is temporally
/// flexible is moved to start exactly `tau` after the previous activity
/// ends, keeping its duration. A spatially flexible activity that follows
/// one of the same zone kind and compat group takes over that zone and
/// position, so the vessel stays where it is. Fixed attributes are copied
/// unchanged.
///
/// Returns the compacted set and the number of activities visited.
pub fn step1_compact(set: &ScheduleSet, topo: &PortTopology, tau: Minutes) -> (ScheduleSet, usize) {
    let mut out = set.clone();
    let mut visits = 0;
    for p in &mut out.portcalls {
        visits += p.activities.len();
        for i in 1..p.activities.len() {
            let (head, tail) = p.activities.split_at_mut(i);
            let prev = &head[i - 1];
            let cur = &mut tail[0];
            if cur.flag_temporal == Fixedness::Flexible {
                cur.interval = cur.interval.starting_at(prev.end() + tau);
            }
            if cur.flag_spatial == Fixedness::Flexible
                && cur.zone_kind == prev.zone_kind
                && cur.zone_id != prev.zone_id
                && topo.compat_group(&cur.zone_id) == topo.compat_group(&prev.zone_id)
            {
                cur.zone_id = prev.zone_id.clone();
                cur.position = prev.position;
            }
        }
    }
    out.widen_window_to_fit();
    (out, visits)
}
