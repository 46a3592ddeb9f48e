use proptest::prelude::*;

use tankersched_core::heuristic::{optimize, optimize_as_flagged};
use tankersched_core::ingest::{emit_records, parse_records};
use tankersched_core::model::{validate, Minutes, Timestamp, Violation};
use tankersched_core::oracle::{brute_force_optimum, enumerate_instances, InstanceLimits};
use tankersched_core::scenario::{sample_flags, ScenarioParams};
use tankersched_core::synth::{generate, SynthConfig};

fn config() -> impl Strategy<Value = SynthConfig> {
    (1usize..30, 1usize..6, 0usize..3, 1u32..8, 1.0f64..6.0).prop_map(|(vessels, berths, anchorages, days, rate)| {
        SynthConfig {
            n_vessels: vessels,
            n_berths: berths,
            n_anchorages: anchorages,
            horizon_days: days,
            arrival_rate: rate,
            ..SynthConfig::default()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn timestamps_print_and_parse_back(minutes in -10_000_000i64..100_000_000) {
        let t = Timestamp::from_minutes(minutes);
        prop_assert_eq!(Timestamp::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn records_round_trip(cfg in config(), seed: u64, t in 0.0f64..=1.0, s in 0.0f64..=1.0) {
        let (set, _) = generate(&cfg, seed).unwrap();
        let flagged = sample_flags(&set, &ScenarioParams::new(t, s, 1.0, seed).unwrap()).unwrap();
        let text = emit_records(&flagged);
        let parsed = parse_records(&text).unwrap();
        prop_assert_eq!(&parsed.set.portcalls, &flagged.portcalls);
        prop_assert_eq!(emit_records(&parsed.set), text);
    }

    #[test]
    fn optimized_schedules_stay_feasible(cfg in config(), seed: u64, t in 0.0f64..=1.0, s in 0.0f64..=1.0) {
        let (set, topo) = generate(&cfg, seed).unwrap();
        let r = optimize(&set, &topo, &ScenarioParams::new(t, s, 1.0, seed).unwrap()).unwrap();
        prop_assert!(r.residual_conflicts.is_empty());
        let left: Vec<Violation> = validate(&r.optimized, &topo);
        prop_assert!(left.is_empty(), "{:?}", left);
    }

    #[test]
    fn no_schedule_beats_the_oracle(seed: u64) {
        let limits = InstanceLimits::default();
        for (set, topo) in enumerate_instances(limits, seed, 5) {
            let o = brute_force_optimum(&set, &topo, Minutes::from_whole_hours(1)).unwrap();
            prop_assert!(validate(&o.schedule, &topo).is_empty());
            let h = optimize_as_flagged(&set, &topo, Minutes::from_whole_hours(1), None).unwrap();
            prop_assert!(o.mean_turnaround_hours <= h.optimized_mean_hours + 1e-9);
        }
    }
}
