use std::path::Path;
use std::process::{Command, Output};

fn moon(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moon"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn instance_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(moon(&["instance", "--seed", "3", "--clusters", "6", "--out", "i.txt"], dir.path()).status.success());
    let exact = moon(&["solve", "i.txt"], dir.path());
    assert!(exact.status.success());
    let vns = moon(&["solve", "i.txt", "--solver", "vns", "--seed", "1"], dir.path());
    assert!(vns.status.success());
    let reward = |o: &Output| stdout(o).split_whitespace().next().unwrap().parse::<f64>().unwrap();
    assert!(reward(&vns) <= reward(&exact) + 1e-9);
    assert!(stdout(&exact).split_whitespace().nth(2) == Some("0"));
}

#[test]
fn pareto_writes_a_csv_front() {
    let dir = tempfile::tempdir().unwrap();
    moon(&["instance", "--seed", "5", "--out", "i.txt"], dir.path());
    let o = moon(&["pareto", "i.txt", "--points", "0", "--out", "front.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("reward,cost,path"));
    assert_eq!(lines.next(), Some("0,0,0"));
    assert!(lines.count() >= 1);
}

#[test]
fn episode_trajectory_starts_at_step_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = moon(&["episode", "--seed", "2", "--planner", "frontier", "--out", "t.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,x,y,event"));
    assert!(lines.next().unwrap().starts_with("0,"));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("frontier:"));
}

#[test]
fn bench_from_config_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.toml"),
        "trials = 2\nlandmarks = [4]\nlong_range_m = [40.0]\n[world]\nwidth_m = 40.0\nheight_m = 40.0\n",
    )
    .unwrap();
    let o = moon(&["bench", "--config", "c.toml", "--planner", "moon,tsp", "--out", "r"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trials.csv", "summary.csv", "spl.svg"] {
        assert!(dir.path().join("r").join(f).exists(), "{f}");
    }
    let summary = std::fs::read_to_string(dir.path().join("r/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["solve", "missing.txt"],
        &["episode", "--planner", "sweeper"],
        &["bench", "--trials", "0"],
        &["bench", "--config", "nope.toml"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = moon(args, dir.path());
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}
