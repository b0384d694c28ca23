//! Seeded trial batches scored by Success weighted by Path Length.
//!
//! Trial `i` of a batch uses seed `base_seed ^ i` for both the workspace and
//! the entity placement, and every planner runs on that same pair.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{distance_field, nearest_matching, Cell, Mask};
use crate::par::{self, Execution};
use crate::planners::{run_episode, EpisodeConfig, MoonConfig, PlannerError, PlannerKind};
use crate::sensing::SensorConfig;
use crate::world::{generate_workspace, place_entities_with, PlacementParams, Pose, WorldError, WorldParams, Workspace};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid benchmark config: {0}")]
    Config(String),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("SPL of an empty result list")]
    Empty,
    #[error("{0:?} is not on a free cell")]
    NotFree(Pose),
    #[error("no path between {from:?} and {to:?}")]
    Disconnected { from: Pose, to: Pose },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    /// Long-range landmark detector radii L to sweep.
    pub long_range_m: Vec<f64>,
    /// Short-range target detector radii R to sweep.
    pub short_range_m: Vec<f64>,
    /// Landmark counts M to sweep.
    pub landmarks: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub planners: Vec<String>,
    pub moon: MoonConfig,
    pub world: WorldParams,
    /// `start_exclusion_m` is raised to R for each configuration.
    pub placement: PlacementParams,
    pub occlusion: bool,
    pub step_cap: Option<usize>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            long_range_m: vec![100.0],
            short_range_m: vec![3.0],
            landmarks: vec![10],
            trials: 100,
            base_seed: 0,
            planners: vec!["frontier".into(), "moon".into()],
            moon: MoonConfig::default(),
            world: WorldParams::default(),
            placement: PlacementParams::default(),
            occlusion: false,
            step_cap: None,
        }
    }
}

impl BenchmarkConfig {
    /// 150 m square world, L = 50, R = 3, M in {10, 15, 20}, 50 trials.
    pub fn desk_scale() -> Self {
        BenchmarkConfig {
            long_range_m: vec![50.0],
            landmarks: vec![10, 15, 20],
            trials: 50,
            world: WorldParams::desk_scale(150.0),
            ..Default::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: BenchmarkConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be >= 1");
        }
        if self.long_range_m.is_empty() || self.short_range_m.is_empty() || self.landmarks.is_empty() {
            return bad("long_range_m, short_range_m and landmarks need at least one value");
        }
        if self
            .long_range_m
            .iter()
            .chain(&self.short_range_m)
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return bad("sensor radii must be positive");
        }
        if self.landmarks.contains(&0) {
            return bad("landmark counts must be positive");
        }
        if self.planners.is_empty() {
            return bad("at least one planner is required");
        }
        self.planner_kinds()?;
        self.moon.validate()?;
        self.world.validate()?;
        Ok(())
    }

    pub fn planner_kinds(&self) -> Result<Vec<PlannerKind>, HarnessError> {
        self.planners
            .iter()
            .map(|p| {
                Ok(match p.parse::<PlannerKind>()? {
                    PlannerKind::Moon(_) => PlannerKind::Moon(self.moon.clone()),
                    other => other,
                })
            })
            .collect()
    }

    /// Every (L, R, M) combination, in declaration order.
    pub fn grid(&self) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::new();
        for &l in &self.long_range_m {
            for &r in &self.short_range_m {
                for &m in &self.landmarks {
                    out.push((l, r, m));
                }
            }
        }
        out
    }
}

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    base_seed ^ trial as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub long_range_m: f64,
    pub short_range_m: f64,
    pub landmarks: usize,
    pub trial: usize,
    pub seed: u64,
    pub planner: String,
    pub success: bool,
    /// Distance traveled, meters.
    pub traveled_m: f64,
    /// Ground-truth shortest distance from the start to the success region.
    pub shortest_m: f64,
    pub steps: usize,
    pub replans: usize,
    /// Empty on success.
    pub failure: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub long_range_m: f64,
    pub short_range_m: f64,
    pub landmarks: usize,
    pub planner: String,
    pub trials: usize,
    pub successes: usize,
    pub spl: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplReport {
    pub summaries: Vec<ConfigSummary>,
    pub trials: Vec<EpisodeResult>,
}

impl SplReport {
    pub fn spl(&self, planner: &str, landmarks: usize) -> Option<f64> {
        self.summaries
            .iter()
            .find(|s| s.planner == planner && s.landmarks == landmarks)
            .map(|s| s.spl)
    }
}

fn free_index(ws: &Workspace, p: &Pose) -> Result<usize, HarnessError> {
    if !ws.in_bounds(p) {
        return Err(HarnessError::NotFree(*p));
    }
    let c = ws.cell_of(p);
    if !ws.is_free(c) {
        return Err(HarnessError::NotFree(*p));
    }
    Ok(c.y * ws.width_cells() + c.x)
}

/// Shortest 8-connected path length between the cells of two poses on the
/// ground-truth grid, meters.
pub fn shortest_path_length(ws: &Workspace, start: &Pose, target: &Pose) -> Result<f64, HarnessError> {
    let (s, t) = (free_index(ws, start)?, free_index(ws, target)?);
    let open = ws.free_mask();
    let mask = Mask {
        width: ws.width_cells(),
        height: ws.height_cells(),
        open: &open,
    };
    let d = distance_field(&mask, s, Some(&[t]))[t];
    if d.is_finite() {
        Ok(d * ws.resolution_m)
    } else {
        Err(HarnessError::Disconnected { from: *start, to: *target })
    }
}

/// Shortest ground-truth distance from `start` to any free cell within one
/// cell of `target`, the region where an episode succeeds.
pub fn success_region_distance(ws: &Workspace, start: &Pose, target: &Pose) -> Result<f64, HarnessError> {
    let s = free_index(ws, start)?;
    let tc = ws.cell_of(target);
    let open = ws.free_mask();
    let w = ws.width_cells();
    let mask = Mask {
        width: w,
        height: ws.height_cells(),
        open: &open,
    };
    nearest_matching(&mask, s, |i| Cell::new(i % w, i / w).chebyshev(tc) <= 1)
        .map(|(d, _)| d * ws.resolution_m)
        .ok_or(HarnessError::Disconnected { from: *start, to: *target })
}

/// `(1/N) * sum S_i * l_i / max(p_i, l_i)` with N the number of results. A
/// success with `p_i = l_i = 0` scores 1.
pub fn compute_spl(results: &[EpisodeResult]) -> Result<f64, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::Empty);
    }
    let total = results.iter().fold(0.0, |acc, r| {
        if !r.success {
            return acc;
        }
        let denom = r.traveled_m.max(r.shortest_m);
        acc + if denom > 0.0 { r.shortest_m / denom } else { 1.0 }
    });
    Ok(total / results.len() as f64)
}

pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<SplReport, HarnessError> {
    run_benchmark_with(cfg, Execution::default())
}

/// Trials are distributed with `exec`; results never depend on it.
pub fn run_benchmark_with(cfg: &BenchmarkConfig, exec: Execution) -> Result<SplReport, HarnessError> {
    cfg.validate()?;
    let planners = cfg.planner_kinds()?;
    let grid = cfg.grid();
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..cfg.trials).map(move |t| (g, t)))
        .collect();
    let rows: Vec<Vec<EpisodeResult>> = par::map(exec, &jobs, |&(g, trial)| {
        let (l, r, m) = grid[g];
        run_trial(cfg, &planners, l, r, m, trial)
    });
    let trials: Vec<EpisodeResult> = rows.into_iter().flatten().collect();
    let mut summaries = Vec::new();
    for &(l, r, m) in &grid {
        for p in &planners {
            let rows: Vec<EpisodeResult> = trials
                .iter()
                .filter(|t| t.long_range_m == l && t.short_range_m == r && t.landmarks == m && t.planner == p.name())
                .cloned()
                .collect();
            summaries.push(ConfigSummary {
                long_range_m: l,
                short_range_m: r,
                landmarks: m,
                planner: p.name().to_string(),
                trials: rows.len(),
                successes: rows.iter().filter(|t| t.success).count(),
                spl: compute_spl(&rows)?,
            });
        }
    }
    Ok(SplReport { summaries, trials })
}

fn run_trial(cfg: &BenchmarkConfig, planners: &[PlannerKind], l: f64, r: f64, m: usize, trial: usize) -> Vec<EpisodeResult> {
    let seed = trial_seed(cfg.base_seed, trial);
    let row = |planner: &str| EpisodeResult {
        long_range_m: l,
        short_range_m: r,
        landmarks: m,
        trial,
        seed,
        planner: planner.to_string(),
        success: false,
        traveled_m: 0.0,
        shortest_m: 0.0,
        steps: 0,
        replans: 0,
        failure: String::new(),
    };
    let setup = (|| -> Result<_, HarnessError> {
        let ws = generate_workspace(seed, &cfg.world)?;
        let mut pp = cfg.placement.clone();
        pp.start_exclusion_m = pp.start_exclusion_m.max(r);
        let placement = place_entities_with(seed, &ws, m, &pp)?;
        let shortest = success_region_distance(&ws, &placement.start, &placement.target)?;
        Ok((ws, placement, shortest))
    })();
    let (ws, placement, shortest) = match setup {
        Ok(s) => s,
        Err(e) => {
            return planners
                .iter()
                .map(|p| EpisodeResult {
                    failure: format!("setup: {e}"),
                    ..row(p.name())
                })
                .collect()
        }
    };
    let ep = EpisodeConfig {
        sensors: SensorConfig {
            long_range_m: l,
            short_range_m: r,
            occlusion: cfg.occlusion,
        },
        step_cap: cfg.step_cap,
        seed,
        record_plans: false,
        exec: Execution::Sequential,
    };
    planners
        .iter()
        .map(|p| {
            let out = run_episode(&ws, &placement, p, &ep);
            EpisodeResult {
                success: out.success,
                traveled_m: out.traveled_m,
                shortest_m: shortest,
                steps: out.steps,
                replans: out.replans,
                failure: out.failure.map(|f| f.label()).unwrap_or_default(),
                ..row(p.name())
            }
        })
        .collect()
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows<T: Serialize>(path: &Path, headers: &[&str], rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(headers).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub const TRIAL_COLUMNS: [&str; 12] = [
    "long_range_m",
    "short_range_m",
    "landmarks",
    "trial",
    "seed",
    "planner",
    "success",
    "traveled_m",
    "shortest_m",
    "steps",
    "replans",
    "failure",
];

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "long_range_m",
    "short_range_m",
    "landmarks",
    "planner",
    "trials",
    "successes",
    "spl",
];

/// Writes `trials.csv`, `summary.csv` and `spl.svg` into `out_dir` and
/// returns their paths.
pub fn emit_report(report: &SplReport, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let trials = out_dir.join("trials.csv");
    let summary = out_dir.join("summary.csv");
    let svg = out_dir.join("spl.svg");
    write_rows(&trials, &TRIAL_COLUMNS, &report.trials)?;
    write_rows(&summary, &SUMMARY_COLUMNS, &report.summaries)?;
    fs::write(&svg, bar_chart(report)).map_err(io_err(&svg))?;
    Ok(vec![trials, summary, svg])
}

/// Reads a `trials.csv` written by [`emit_report`].
pub fn read_trials(path: &Path) -> Result<Vec<EpisodeResult>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

fn bar_chart(report: &SplReport) -> String {
    let mut groups: Vec<String> = Vec::new();
    let mut planners: Vec<String> = Vec::new();
    for s in &report.summaries {
        let g = format!("L={} R={} M={}", s.long_range_m, s.short_range_m, s.landmarks);
        if !groups.contains(&g) {
            groups.push(g);
        }
        if !planners.contains(&s.planner) {
            planners.push(s.planner.clone());
        }
    }
    const COLORS: [&str; 4] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"];
    let (bar, gap, plot_h, left, top) = (28.0, 24.0, 200.0, 40.0, 30.0);
    let group_w = bar * planners.len().max(1) as f64 + gap;
    let width = left + group_w * groups.len().max(1) as f64 + 20.0;
    let height = top + plot_h + 60.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="16" font-size="12">SPL by configuration and planner</text>"#);
    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let y = top + plot_h * (1.0 - v);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="4" y="{}">{v:.2}</text>"##,
            width - 20.0,
            y + 3.0
        );
    }
    for (gi, g) in groups.iter().enumerate() {
        let x0 = left + gi as f64 * group_w + gap / 2.0;
        for (pi, p) in planners.iter().enumerate() {
            let spl = report
                .summaries
                .iter()
                .find(|r| {
                    &r.planner == p && &format!("L={} R={} M={}", r.long_range_m, r.short_range_m, r.landmarks) == g
                })
                .map_or(0.0, |r| r.spl);
            let h = plot_h * spl.clamp(0.0, 1.0);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{}" height="{h}" fill="{}"><title>{p} {g}: {spl:.4}</title></rect>"#,
                x0 + pi as f64 * bar,
                top + plot_h - h,
                bar - 2.0,
                COLORS[pi % COLORS.len()]
            );
        }
        let _ = writeln!(s, r#"<text x="{x0}" y="{}">{g}</text>"#, top + plot_h + 14.0);
    }
    for (pi, p) in planners.iter().enumerate() {
        let y = top + plot_h + 32.0 + 12.0 * (pi / 4) as f64;
        let x = left + 90.0 * (pi % 4) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{}" width="8" height="8" fill="{}"/><text x="{}" y="{}">{p}</text>"#,
            y - 8.0,
            COLORS[pi % COLORS.len()],
            x + 12.0,
            y
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(success: bool, l: f64, p: f64) -> EpisodeResult {
        EpisodeResult {
            long_range_m: 100.0,
            short_range_m: 3.0,
            landmarks: 10,
            trial: 0,
            seed: 0,
            planner: "moon".into(),
            success,
            traveled_m: p,
            shortest_m: l,
            steps: 0,
            replans: 0,
            failure: String::new(),
        }
    }

    #[test]
    fn spl_examples() {
        assert_eq!(compute_spl(&[result(false, 5.0, 9.0), result(false, 1.0, 1.0)]).unwrap(), 0.0);
        assert_eq!(compute_spl(&[result(true, 7.0, 7.0)]).unwrap(), 1.0);
        assert_eq!(compute_spl(&[result(true, 10.0, 20.0), result(true, 5.0, 5.0)]).unwrap(), 0.75);
        assert!(matches!(compute_spl(&[]), Err(HarnessError::Empty)));
    }

    #[test]
    fn shortest_path_examples() {
        let ws = Workspace::from_text("...........\n", 1.0).unwrap();
        let a = Pose::new(0.5, 0.5);
        assert_eq!(shortest_path_length(&ws, &a, &a).unwrap(), 0.0);
        assert_eq!(shortest_path_length(&ws, &a, &Pose::new(10.5, 0.5)).unwrap(), 10.0);
        // Detour fixture: wall at x = 2 for rows 0..=2. From (0,0) to
        // (4,0): 2 down, diagonal to (1,3), 2 east to (3,3), diagonal to
        // (4,2), 2 up = 6 + 2 sqrt 2.
        let ws = Workspace::from_text("..#..\n..#..\n..#..\n.....\n", 1.0).unwrap();
        let d = shortest_path_length(&ws, &a, &Pose::new(4.5, 0.5)).unwrap();
        assert!((d - (6.0 + 2.0 * crate::grid::SQRT_2)).abs() < 1e-9, "{d}");
        assert!(matches!(
            shortest_path_length(&ws, &a, &Pose::new(2.5, 0.5)),
            Err(HarnessError::NotFree(_))
        ));
        // Nearest region cell is (3, 1); the wall forbids cutting (2,3)->(3,2).
        let r = success_region_distance(&ws, &a, &Pose::new(4.5, 0.5)).unwrap();
        assert!((r - (6.0 + crate::grid::SQRT_2)).abs() < 1e-9, "{r}");
    }

    #[test]
    fn config_validation_and_toml() {
        let cfg = BenchmarkConfig::desk_scale();
        cfg.validate().unwrap();
        assert_eq!(BenchmarkConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
        let parsed = BenchmarkConfig::from_toml_str("trials = 3\nlandmarks = [5]\nplanners = [\"moon\"]\n").unwrap();
        assert_eq!(parsed.trials, 3);
        assert!(BenchmarkConfig::from_toml_str("trials = 0").is_err());
        assert!(BenchmarkConfig::from_toml_str("planners = [\"sweeper\"]").is_err());
        assert!(BenchmarkConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn empty_report_gives_header_only_csvs() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&SplReport::default(), dir.path()).unwrap();
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), TRIAL_COLUMNS.join(",") + "\n");
        assert_eq!(fs::read_to_string(&files[1]).unwrap(), SUMMARY_COLUMNS.join(",") + "\n");
        assert!(fs::read_to_string(&files[2]).unwrap().starts_with("<svg"));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_report(&SplReport::default(), &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
