use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use moon_core::harness::{self, BenchmarkConfig, SplReport};
use moon_core::moo::{pareto_enumerate_with, EpsilonGrid, Objective};
use moon_core::planners::{run_episode, write_trajectory_csv, EpisodeConfig, PlannerKind};
use moon_core::sensing::SensorConfig;
use moon_core::sop::random::{random_instance, RandomInstanceParams};
use moon_core::sop::{solve_exact, solve_vns, validate, DEFAULT_VNS_ITERS};
use moon_core::world::{generate_workspace, place_entities_with, PlacementParams, WorldParams};
use moon_core::{Execution, SopInstance};

#[derive(Parser)]
#[command(name = "moon", version, about = "Object-goal navigation simulator and SOP planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded trial batch and write trials.csv, summary.csv and spl.svg.
    Bench(BenchArgs),
    /// Run one episode and write its trajectory as CSV.
    Episode(EpisodeArgs),
    /// Generate a random SOP instance.
    Instance(InstanceArgs),
    /// Solve an SOP instance file.
    Solve(SolveArgs),
    /// Enumerate the Pareto front of an SOP instance file.
    Pareto(ParetoArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// TOML benchmark config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the 150 m desk-scale preset instead of the defaults.
    #[arg(long, conflicts_with = "config")]
    desk: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated planner names (moon, frontier, tsp).
    #[arg(long, value_delimiter = ',')]
    planner: Vec<String>,
    /// Long-range detector radii, meters.
    #[arg(long = "L", value_delimiter = ',')]
    long_range: Vec<f64>,
    /// Short-range detector radii, meters.
    #[arg(long = "R", value_delimiter = ',')]
    short_range: Vec<f64>,
    /// Landmark counts.
    #[arg(long = "M", value_delimiter = ',')]
    landmarks: Vec<usize>,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Run trials one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EpisodeArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "moon")]
    planner: String,
    #[arg(long = "L", default_value_t = 50.0)]
    long_range: f64,
    #[arg(long = "R", default_value_t = 3.0)]
    short_range: f64,
    #[arg(long = "M", default_value_t = 10)]
    landmarks: usize,
    /// Side of the square world, meters.
    #[arg(long, default_value_t = 60.0)]
    size: f64,
    #[arg(long)]
    occlusion: bool,
    /// Trajectory CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    clusters: usize,
    /// Instance path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Exact,
    Vns,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    solver: Solver,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_VNS_ITERS)]
    iters: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Reward,
    Cost,
    Detection,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Reward => Objective::Reward,
            ObjectiveArg::Cost => Objective::Cost,
            ObjectiveArg::Detection => Objective::Detection,
        }
    }
}

#[derive(Args)]
struct ParetoArgs {
    instance: PathBuf,
    /// Comma-separated; the first is optimized, the rest are bounded.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "reward,cost")]
    objectives: Vec<ObjectiveArg>,
    /// Bounds per secondary objective; 0 selects adaptive bounds.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench(a) => bench(a),
        Command::Episode(a) => episode(a),
        Command::Instance(a) => instance(a),
        Command::Solve(a) => solve(a),
        Command::Pareto(a) => pareto(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_instance(path: &Path) -> Result<SopInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SopInstance::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut cfg = match (&a.config, a.desk) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            BenchmarkConfig::from_toml_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        (None, true) => BenchmarkConfig::desk_scale(),
        (None, false) => BenchmarkConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.base_seed = s;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if !a.planner.is_empty() {
        cfg.planners = a.planner;
    }
    if !a.long_range.is_empty() {
        cfg.long_range_m = a.long_range;
    }
    if !a.short_range.is_empty() {
        cfg.short_range_m = a.short_range;
    }
    if !a.landmarks.is_empty() {
        cfg.landmarks = a.landmarks;
    }
    let exec = if a.sequential { Execution::Sequential } else { Execution::default() };
    let report = harness::run_benchmark_with(&cfg, exec)?;
    let files = harness::emit_report(&report, &a.out)?;
    print_summary(&report);
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn print_summary(report: &SplReport) {
    println!("{:>6} {:>6} {:>4} {:>9} {:>7} {:>8}", "L", "R", "M", "planner", "success", "SPL");
    for s in &report.summaries {
        println!(
            "{:>6} {:>6} {:>4} {:>9} {:>3}/{:<3} {:>8.4}",
            s.long_range_m, s.short_range_m, s.landmarks, s.planner, s.successes, s.trials, s.spl
        );
    }
}

fn episode(a: EpisodeArgs) -> Result<()> {
    let planner: PlannerKind = a.planner.parse()?;
    let ws = generate_workspace(a.seed, &WorldParams::desk_scale(a.size))?;
    let pp = PlacementParams {
        start_exclusion_m: PlacementParams::default().start_exclusion_m.max(a.short_range),
        ..Default::default()
    };
    let placement = place_entities_with(a.seed, &ws, a.landmarks, &pp)?;
    let cfg = EpisodeConfig {
        sensors: SensorConfig {
            long_range_m: a.long_range,
            short_range_m: a.short_range,
            occlusion: a.occlusion,
        },
        seed: a.seed,
        ..Default::default()
    };
    let out = run_episode(&ws, &placement, &planner, &cfg);
    let shortest = harness::success_region_distance(&ws, &placement.start, &placement.target)?;
    write_trajectory_csv(&out.trajectory, output(a.out.as_deref())?)?;
    eprintln!(
        "{}: success={} traveled={:.2} m shortest={:.2} m steps={} replans={}{}",
        out.planner,
        out.success,
        out.traveled_m,
        shortest,
        out.steps,
        out.replans,
        out.failure.map(|f| format!(" failure={}", f.label())).unwrap_or_default()
    );
    Ok(())
}

fn instance(a: InstanceArgs) -> Result<()> {
    if a.clusters == 0 {
        bail!("--clusters must be >= 1");
    }
    let p = RandomInstanceParams {
        clusters: a.clusters,
        ..Default::default()
    };
    let inst = random_instance(a.seed, &p);
    output(a.out.as_deref())?.write_all(inst.to_text().as_bytes())?;
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let sol = match a.solver {
        Solver::Exact => solve_exact(&inst)?,
        Solver::Vns => {
            if a.iters == 0 {
                bail!("--iters must be >= 1");
            }
            solve_vns(&inst, a.seed, a.iters)
        }
    };
    let report = validate(&inst, &sol);
    if !report.is_valid() {
        bail!("solver produced an invalid solution: {:?}", report.violations);
    }
    println!("{}", sol.to_line());
    Ok(())
}

fn pareto(a: ParetoArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let objectives: Vec<Objective> = a.objectives.into_iter().map(Into::into).collect();
    let grid = match a.points {
        0 => EpsilonGrid::Adaptive,
        n => EpsilonGrid::Uniform { points: n },
    };
    let front = pareto_enumerate_with(&inst, &objectives, &grid, Execution::default())?;
    front.write_csv(output(a.out.as_deref())?)?;
    Ok(())
}
