use moon_core::harness::*;
use moon_core::world::WorldParams;
use moon_core::Execution;

fn smoke() -> BenchmarkConfig {
    BenchmarkConfig {
        long_range_m: vec![50.0],
        landmarks: vec![5],
        trials: 20,
        world: WorldParams::desk_scale(60.0),
        ..Default::default()
    }
}

#[test]
fn desk_smoke_config_orders_moon_above_frontier() {
    let report = run_benchmark(&smoke()).unwrap();
    let moon = report.spl("moon", 5).unwrap();
    let frontier = report.spl("frontier", 5).unwrap();
    assert!(moon > frontier, "moon {moon} frontier {frontier}");
    assert_eq!(report.trials.len(), 40);
    for t in report.trials.iter().filter(|t| t.success) {
        assert!(t.shortest_m <= t.traveled_m + 1e-9, "{t:?}");
    }
    for s in &report.summaries {
        assert!((0.0..=1.0).contains(&s.spl));
    }
}

#[test]
fn planners_share_the_trial_world() {
    let cfg = BenchmarkConfig {
        trials: 1,
        base_seed: 9,
        ..smoke()
    };
    let report = run_benchmark(&cfg).unwrap();
    let [a, b] = &report.trials[..] else { panic!("{:?}", report.trials) };
    assert_eq!((a.seed, a.shortest_m), (b.seed, b.shortest_m));
    assert_eq!(a.seed, trial_seed(9, 0));
}

#[test]
fn two_configs_two_planners_give_four_summaries() {
    let cfg = BenchmarkConfig {
        landmarks: vec![3, 6],
        trials: 2,
        ..smoke()
    };
    let report = run_benchmark(&cfg).unwrap();
    assert_eq!(report.summaries.len(), 4);
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&report, dir.path()).unwrap();
    let summary = std::fs::read_to_string(&files[1]).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert_eq!(read_trials(&files[0]).unwrap(), report.trials);
}

#[test]
fn execution_mode_does_not_change_results() {
    let cfg = BenchmarkConfig {
        trials: 4,
        planners: vec!["moon".into(), "frontier".into(), "tsp".into()],
        ..smoke()
    };
    let par = run_benchmark_with(&cfg, Execution::Parallel).unwrap();
    let seq = run_benchmark_with(&cfg, Execution::Sequential).unwrap();
    assert_eq!(par, seq);
}
