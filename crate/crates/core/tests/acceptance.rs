//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tankersched_core::heuristic::{optimize_as_flagged, step1_compact};
use tankersched_core::horizon::{run_rolling, savings, slice_windows};
use tankersched_core::ingest::{emit_records, emit_topology, parse_records, parse_topology};
use tankersched_core::model::{
    berth_overlaps, ActivityRecord, Fixedness, GeoPoint, Interval, Minutes, PortTopology, Portcall, RecordRef,
    ScheduleSet, Timestamp, VesselId, Zone, ZoneId, ZoneKind,
};
use tankersched_core::oracle::{brute_force_optimum, enumerate_instances, InstanceLimits};
use tankersched_core::scenario::{sample_flags, ScenarioParams};
use tankersched_core::synth::{generate, SynthConfig};

const TAU: Minutes = Minutes::from_whole_hours(1);

fn report(criterion: u32, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let within = elapsed <= limit;
    // straight to the handle so the line shows even when the harness captures output
    let _ = writeln!(
        std::io::stderr(),
        "{} criterion {criterion} ({name}): {detail} [{:.2}s, limit {}s]",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
    assert!(within, "criterion {criterion} ({name}) exceeded {}s", limit.as_secs());
}

const S_COLUMNS: [&str; 5] = ["0.1", "0.3", "0.5", "0.7", "0.9"];

/// Hours and percent per row T = 0.1..0.9, columns S = 0.1..0.9.
type Table = [[(f64, f64); 5]; 5];

const ONE_WEEK: Table = [
    [(1.14, 1.90), (1.37, 2.27), (0.83, 1.39), (1.30, 2.16), (1.32, 2.20)],
    [(4.16, 6.92), (4.41, 7.33), (4.06, 6.75), (4.46, 7.41), (4.37, 7.26)],
    [
        (7.53, 12.51),
        (7.73, 12.85),
        (7.39, 12.28),
        (7.40, 12.31),
        (7.39, 12.28),
    ],
    [
        (11.51, 19.15),
        (11.37, 18.91),
        (11.83, 19.67),
        (11.55, 19.20),
        (11.36, 18.89),
    ],
    [
        (15.31, 25.46),
        (15.84, 26.34),
        (16.83, 27.99),
        (16.88, 28.06),
        (17.07, 28.38),
    ],
];

const TWO_WEEKS: Table = [
    [(1.93, 1.60), (2.82, 2.33), (2.74, 2.26), (2.06, 1.70), (1.79, 1.48)],
    [(8.22, 6.79), (8.81, 7.28), (8.92, 7.38), (8.71, 7.20), (8.81, 7.28)],
    [
        (17.27, 14.27),
        (16.72, 13.82),
        (17.63, 14.57),
        (17.45, 14.42),
        (16.31, 13.48),
    ],
    [
        (27.97, 23.12),
        (27.93, 23.09),
        (29.27, 24.19),
        (28.13, 23.25),
        (29.49, 24.38),
    ],
    [
        (45.41, 37.53),
        (44.56, 36.83),
        (42.83, 35.40),
        (45.03, 37.22),
        (44.53, 36.81),
    ],
];

const THREE_WEEKS: Table = [
    [(2.90, 1.61), (3.95, 2.19), (4.80, 2.66), (3.27, 1.81), (3.02, 1.68)],
    [
        (11.89, 6.60),
        (14.53, 8.06),
        (12.48, 6.92),
        (13.01, 7.22),
        (12.57, 6.98),
    ],
    [
        (25.07, 13.91),
        (24.99, 13.87),
        (25.43, 14.11),
        (25.95, 14.40),
        (25.80, 14.31),
    ],
    [
        (41.38, 22.96),
        (43.96, 24.39),
        (43.08, 23.91),
        (43.31, 24.03),
        (43.62, 24.20),
    ],
    [
        (69.29, 38.45),
        (71.92, 39.91),
        (70.86, 39.32),
        (71.64, 39.75),
        (72.80, 40.40),
    ],
];

#[test]
fn criterion_1_published_percentages_recompute() {
    let t0 = Instant::now();
    let mut cells = 0;
    let mut mismatches = Vec::new();
    let mut raw_max = 0.0f64;
    for (weeks, benchmark, table) in [
        (1, 60.140, ONE_WEEK),
        (2, 120.993, TWO_WEEKS),
        (3, 180.223, THREE_WEEKS),
    ] {
        for (ti, row) in table.iter().enumerate() {
            for (si, &(hours, printed)) in row.iter().enumerate() {
                cells += 1;
                let (saved, pct) = savings(benchmark, benchmark - hours).unwrap();
                assert!((saved - hours).abs() < 1e-9);
                raw_max = raw_max.max((pct - printed).abs());
                let hundredths = (pct * 100.0).round() as i64;
                let published = (printed * 100.0).round() as i64;
                if (hundredths - published).abs() > 1 {
                    mismatches.push(format!("{weeks}w T={} S={}", 0.1 + 0.2 * ti as f64, S_COLUMNS[si]));
                }
            }
        }
    }
    let detail = format!(
        "{cells} cells, {} off at 2-decimal precision, raw max deviation {raw_max:.4} pp",
        mismatches.len()
    );
    report(
        1,
        "published arithmetic",
        cells == 75 && mismatches.is_empty(),
        t0.elapsed(),
        Duration::from_secs(1),
        &detail,
    );
}

#[test]
fn criterion_2_month_window_structure() {
    let t0 = Instant::now();
    let (set, _) = generate(&SynthConfig::default(), 1).unwrap();
    let may1 = Timestamp::parse("2017-05-01 00:00:00").unwrap();
    let june1 = Timestamp::parse("2017-06-01 00:00:00").unwrap();
    let month = ScheduleSet::with_window(set.portcalls.clone(), may1, june1);
    let expected: [&[&str]; 3] = [
        &["wk1", "wk2", "wk3", "wk4", "wk5"],
        &["wk1+wk2", "wk2+wk3", "wk3+wk4", "wk4+wk5"],
        &["wk1+wk2+wk3", "wk2+wk3+wk4", "wk3+wk4+wk5"],
    ];
    let mut ok = true;
    let mut counts = Vec::new();
    for (weeks, labels) in (1..=3).zip(expected) {
        let windows = slice_windows(&month, weeks).unwrap();
        let got: Vec<&str> = windows.iter().map(|(w, _)| w.label.as_str()).collect();
        ok &= got == labels;
        ok &= windows.last().map(|(w, _)| w.end) == Some(june1);
        counts.push(windows.len().to_string());
        if weeks == 1 {
            ok &= windows.iter().map(|(w, _)| w.vessel_count).sum::<usize>() == month.portcalls.len();
            ok &= windows[4].0.start == Timestamp::parse("2017-05-29 00:00:00").unwrap();
        }
    }
    let detail = format!("{} windows for 1/2/3 weeks", counts.join("/"));
    report(2, "window structure", ok, t0.elapsed(), Duration::from_secs(1), &detail);
}

fn random_config(rng: &mut ChaCha8Rng) -> SynthConfig {
    let n_berths = rng.gen_range(1..=8);
    SynthConfig {
        n_vessels: rng.gen_range(1..=40),
        n_berths,
        n_anchorages: rng.gen_range(0..=3),
        n_compat_groups: rng.gen_range(1..=n_berths.min(3)),
        horizon_days: rng.gen_range(2..=10),
        arrival_rate: rng.gen_range(1.0..8.0),
        ..SynthConfig::default()
    }
}

fn key(r: &RecordRef) -> (usize, usize) {
    (r.portcall, r.activity)
}

fn check_invariants(set: &ScheduleSet, topo: &PortTopology) -> Result<(), String> {
    let step1 = step1_compact(set, topo, TAU).0;
    for p in &step1.portcalls {
        for w in p.activities.windows(2) {
            if w[1].flag_temporal.is_flexible() && w[1].start() != w[0].end() + TAU {
                return Err(format!("step 1 gap for vessel {}", p.vessel_id));
            }
        }
    }

    let r = optimize_as_flagged(set, topo, TAU, None).map_err(|e| e.to_string())?;
    let out = &r.optimized;
    if out.portcalls.len() != set.portcalls.len() {
        return Err("portcall count changed".into());
    }
    for (before, after) in set.portcalls.iter().zip(&out.portcalls) {
        if before.activities.len() != after.activities.len() {
            return Err("activity count changed".into());
        }
        for (a, b) in before.activities.iter().zip(&after.activities) {
            if a.duration() != b.duration() {
                return Err(format!("duration changed for vessel {}", a.vessel_id));
            }
            if a.is_fully_fixed() && a != b {
                return Err(format!("fixed record of vessel {} changed", a.vessel_id));
            }
            if a.flag_temporal.is_fixed() && a.interval != b.interval {
                return Err(format!("fixed time of vessel {} changed", a.vessel_id));
            }
            if a.flag_spatial.is_fixed() && a.zone_id != b.zone_id {
                return Err(format!("fixed zone of vessel {} changed", a.vessel_id));
            }
        }
    }

    let listed: HashSet<_> = r
        .residual_conflicts
        .iter()
        .map(|c| (key(&c.first).min(key(&c.second)), key(&c.first).max(key(&c.second))))
        .collect();
    for o in berth_overlaps(out) {
        let pair = (key(&o.first).min(key(&o.second)), key(&o.first).max(key(&o.second)));
        if !listed.contains(&pair) {
            return Err(format!("unlisted overlap at {}", o.zone_id));
        }
    }
    let rec = |k: (usize, usize)| &set.portcalls[k.0].activities[k.1];
    if let Some(c) = r
        .residual_conflicts
        .iter()
        .find(|c| !rec(key(&c.first)).is_fully_fixed() || !rec(key(&c.second)).is_fully_fixed())
    {
        return Err(format!("residual conflict at {} involves a movable stay", c.zone_id));
    }

    if optimize_as_flagged(set, topo, TAU, None).map_err(|e| e.to_string())? != r {
        return Err("not deterministic".into());
    }
    Ok(())
}

#[test]
fn criterion_3_heuristic_invariants() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let (mut instances, mut activities) = (0, 0);
    while instances < 1000 {
        let cfg = random_config(&mut rng);
        let (set, topo) = generate(&cfg, rng.gen()).unwrap();
        let params = ScenarioParams::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0), 1.0, rng.gen()).unwrap();
        let flagged = sample_flags(&set, &params).unwrap();
        instances += 1;
        activities += flagged.activity_count();
        if let Err(e) = check_invariants(&flagged, &topo) {
            failures.push(e);
        }
    }
    let detail = format!(
        "{instances} instances, {activities} activities, {} violations{}",
        failures.len(),
        failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    report(
        3,
        "heuristic invariants",
        failures.is_empty(),
        t0.elapsed(),
        Duration::from_secs(30),
        &detail,
    );
}

fn chain(rng: &mut ChaCha8Rng, anchorage_first: bool) -> (ScheduleSet, PortTopology, Minutes) {
    let base = Timestamp::parse("2017-05-01 00:00:00").unwrap();
    let pos = GeoPoint::new(1.26, 103.82).unwrap();
    let zone = |id: &str, kind| Zone {
        zone_id: ZoneId::new(id),
        kind,
        position: pos,
        compat_group: if kind == ZoneKind::Berth { "G1" } else { "ANCH" }.into(),
    };
    let topo = PortTopology::new([zone("A1", ZoneKind::Anchorage), zone("B1", ZoneKind::Berth)]).unwrap();
    let k = rng.gen_range(1..=2);
    let mut start = base + Minutes::new(rng.gen_range(0..600));
    let mut acts = Vec::new();
    let mut total = Minutes::ZERO;
    for i in 0..k {
        let d = Minutes::new(rng.gen_range(30..900));
        let (id, kind) = if i == 0 && anchorage_first && k > 1 {
            ("A1", ZoneKind::Anchorage)
        } else {
            ("B1", ZoneKind::Berth)
        };
        acts.push(ActivityRecord {
            vessel_id: VesselId(563_000_001),
            zone_kind: kind,
            zone_id: ZoneId::new(id),
            position: pos,
            interval: Interval::new(start, start + d).unwrap(),
            flag_temporal: Fixedness::Flexible,
            flag_spatial: Fixedness::Flexible,
        });
        total = total + d;
        start = start + d + Minutes::new(rng.gen_range(60..2000));
    }
    let expected = total + Minutes::new(TAU.get() * (k as i64 - 1));
    (
        ScheduleSet::from_portcalls(vec![Portcall::new(acts).unwrap()]),
        topo,
        expected,
    )
}

#[test]
fn criterion_4_oracle_bound() {
    let t0 = Instant::now();
    let limits = InstanceLimits::new(3, 2, 2).unwrap();
    let (mut n, mut fixed, mut flexible, mut tight) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for (set, topo) in enumerate_instances(limits, 2024, 500) {
        n += 1;
        let h = optimize_as_flagged(&set, &topo, TAU, None).unwrap();
        let o = brute_force_optimum(&set, &topo, TAU).unwrap();
        let baseline = h.baseline_mean_hours;
        let oracle_saved = baseline - o.mean_turnaround_hours;
        if h.saved_hours > oracle_saved + 1e-9 {
            failures.push(format!(
                "instance {n}: heuristic {} > oracle {}",
                h.saved_hours, oracle_saved
            ));
        }
        if (h.saved_hours - oracle_saved).abs() <= 1e-9 {
            tight += 1;
        }
        let records: Vec<_> = set.activities().collect();
        if records.iter().all(|a| a.is_fully_fixed()) {
            fixed += 1;
            if (h.optimized_mean_hours - baseline).abs() > 1e-9 || (o.mean_turnaround_hours - baseline).abs() > 1e-9 {
                failures.push(format!("instance {n}: all-fixed optimum differs from baseline"));
            }
        }
        if records
            .iter()
            .all(|a| a.flag_temporal.is_flexible() && a.flag_spatial.is_flexible())
        {
            flexible += 1;
            if !h.residual_conflicts.is_empty() {
                failures.push(format!("instance {n}: residual conflicts on a flexible instance"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let (set, topo, expected) = chain(&mut rng, i % 2 == 0);
        let o = brute_force_optimum(&set, &topo, TAU).unwrap();
        let h = optimize_as_flagged(&set, &topo, TAU, None).unwrap();
        if o.total_turnaround != expected || (h.optimized_mean_hours - expected.hours()).abs() > 1e-9 {
            failures.push(format!("chain {i}: expected {expected}"));
        }
    }
    let detail = format!(
        "{n} instances ({fixed} all-fixed, {flexible} all-flexible, {tight} matching the optimum), 100 chains, {} failures{}",
        failures.len(),
        failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    report(
        4,
        "oracle bound",
        failures.is_empty() && fixed > 0 && flexible > 0,
        t0.elapsed(),
        Duration::from_secs(120),
        &detail,
    );
}

const SEEDS: std::ops::RangeInclusive<u64> = 1..=20;

fn mean_saved_percent(t: f64, s: f64, weeks: u32) -> Vec<f64> {
    SEEDS
        .map(|seed| {
            let (set, topo) = generate(&SynthConfig::default(), seed).unwrap();
            let params = ScenarioParams::new(t, s, 1.0, seed).unwrap();
            run_rolling(&set, &topo, &params, weeks).unwrap().saved_percent
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn criterion_5_temporal_flexibility_dominates() {
    let t0 = Instant::now();
    let levels = [0.1, 0.5, 0.9];
    // grid[ti][si]
    let grid: Vec<Vec<f64>> = levels
        .iter()
        .map(|&t| levels.iter().map(|&s| mean(&mean_saved_percent(t, s, 1))).collect())
        .collect();
    let increasing = (0..3).all(|si| grid[0][si] < grid[1][si] && grid[1][si] < grid[2][si]);
    let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    let across_s = (0..3).map(|ti| spread(&grid[ti])).fold(f64::MIN, f64::max);
    let across_t = (0..3)
        .map(|si| spread(&[grid[0][si], grid[1][si], grid[2][si]]))
        .fold(f64::MAX, f64::min);
    let rows: Vec<String> = grid
        .iter()
        .zip(levels)
        .map(|(r, t)| format!("T={t}: {:.2}/{:.2}/{:.2}", r[0], r[1], r[2]))
        .collect();
    let detail = format!(
        "saved % by S=0.1/0.5/0.9 {}; max spread across S {across_s:.2} vs min across T {across_t:.2}",
        rows.join(", ")
    );
    report(
        5,
        "flexibility trend",
        increasing && across_s < across_t,
        t0.elapsed(),
        Duration::from_secs(300),
        &detail,
    );
}

#[test]
fn criterion_6_longer_windows_save_more() {
    let t0 = Instant::now();
    let by_weeks: Vec<Vec<f64>> = (1..=3).map(|w| mean_saved_percent(0.9, 0.9, w)).collect();
    let ordered = (0..by_weeks[0].len())
        .filter(|&i| by_weeks[2][i] >= by_weeks[1][i] && by_weeks[1][i] >= by_weeks[0][i])
        .count();
    let detail = format!(
        "3w >= 2w >= 1w in {ordered} of 20 seeds; mean saved % {:.2} / {:.2} / {:.2}",
        mean(&by_weeks[0]),
        mean(&by_weeks[1]),
        mean(&by_weeks[2])
    );
    report(
        6,
        "window trend",
        ordered >= 15,
        t0.elapsed(),
        Duration::from_secs(300),
        &detail,
    );
}

#[test]
fn criterion_7_step2_scaling() {
    let t0 = Instant::now();
    let base = SynthConfig::default();
    let (month, _) = generate(&base, 1).unwrap();
    let per_day = month.activity_count() as f64 / base.horizon_days as f64;
    let mut points = Vec::new();
    for target in [200.0, 400.0, 800.0, 1600.0] {
        let days = (target / per_day).round() as u32;
        let cfg = SynthConfig {
            horizon_days: days,
            n_vessels: (base.n_vessels as f64 * days as f64 / base.horizon_days as f64).round() as usize,
            ..base.clone()
        };
        let (mut n, mut comparisons) = (0.0, 0.0);
        for seed in 1..=3 {
            let (set, topo) = generate(&cfg, seed).unwrap();
            let flagged = sample_flags(&set, &ScenarioParams::new(0.9, 0.9, 1.0, seed).unwrap()).unwrap();
            let r = optimize_as_flagged(&flagged, &topo, TAU, None).unwrap();
            n += set.activity_count() as f64;
            comparisons += r.counters.step2_comparisons as f64;
        }
        points.push(((n / 3.0).ln(), (comparisons / 3.0).ln()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sizes: Vec<String> = points.iter().map(|p| format!("{:.0}", p.0.exp())).collect();
    let detail = format!("log-log slope {slope:.3} over n = {}", sizes.join(", "));
    report(
        7,
        "step 2 scaling",
        slope <= 2.2,
        t0.elapsed(),
        Duration::from_secs(120),
        &detail,
    );
}

#[test]
fn criterion_8_csv_round_trip() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    let mut records = 0;
    for _ in 0..100 {
        let cfg = random_config(&mut rng);
        let (set, topo) = generate(&cfg, rng.gen()).unwrap();
        let flagged = sample_flags(&set, &ScenarioParams::new(0.5, 0.5, 1.0, rng.gen()).unwrap()).unwrap();
        let text = emit_records(&flagged);
        let parsed = parse_records(&text).unwrap();
        let topo_text = emit_topology(&topo);
        records += flagged.activity_count();
        if emit_records(&parsed.set) != text
            || parsed.set.portcalls != flagged.portcalls
            || emit_topology(&parse_topology(&topo_text).unwrap()) != topo_text
        {
            failures += 1;
        }
    }
    let detail = format!("100 sets, {records} records, {failures} mismatches");
    report(
        8,
        "CSV round trip",
        failures == 0,
        t0.elapsed(),
        Duration::from_secs(10),
        &detail,
    );
}
