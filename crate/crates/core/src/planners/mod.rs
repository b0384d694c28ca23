//! Episode simulation and the three decision policies.
//!
//! An episode alternates a planner decision (a waypoint cell) with
//! [`advance`], which moves the robot one grid step toward it and senses.
//! Once the target has been detected every planner is bypassed and the
//! robot closes to within one cell of it.

pub mod frontier;
mod moon;
pub mod tsp;

use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{nearest_matching, route, Cell, Mask, SQRT_2};
use crate::navgraph::{viewpoint_radius, LandmarkExclusion, Node, PlanningProblem};
use crate::par::Execution;
use crate::sensing::{sense, BeliefMap, ObservationEvent, SensorConfig};
use crate::sop::{SopSolution, DEFAULT_EXACT_LIMIT};
use crate::world::{EntityPlacement, Pose, Workspace};

pub use frontier::frontier_step;
pub use moon::moon_step;
pub use tsp::tsp_step;

/// When MOON rebuilds its plan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplanTrigger {
    /// On every newly observed landmark, and when the plan runs out.
    #[default]
    NewLandmark,
    /// Only when the plan runs out.
    Exhaustion,
    /// Plan once; running out of plan ends the episode.
    Never,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoonConfig {
    /// Fixed SOP budget; `None` uses the remaining step allowance in meters.
    pub budget_m: Option<f64>,
    /// Weight of frontier pseudo-cluster rewards relative to landmark
    /// relevance.
    pub explore_weight: f64,
    pub replan_trigger: ReplanTrigger,
    pub exclusion: LandmarkExclusion,
    /// Largest number of selectable clusters handed to the exact solver.
    pub exact_limit: usize,
    pub vns_iters: usize,
}

impl Default for MoonConfig {
    fn default() -> Self {
        MoonConfig {
            budget_m: None,
            explore_weight: 0.5,
            replan_trigger: ReplanTrigger::default(),
            exclusion: LandmarkExclusion::default(),
            exact_limit: DEFAULT_EXACT_LIMIT,
            vns_iters: 100,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("unknown planner {0:?}; expected moon, frontier or tsp")]
    Unknown(String),
    #[error("invalid moon config: {0}")]
    InvalidMoon(String),
}

impl MoonConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if let Some(b) = self.budget_m {
            if !(b.is_finite() && b > 0.0) {
                return Err(PlannerError::InvalidMoon(format!("budget_m {b} must be > 0")));
            }
        }
        if !(self.explore_weight.is_finite() && self.explore_weight >= 0.0) {
            return Err(PlannerError::InvalidMoon(format!(
                "explore_weight {} must be >= 0",
                self.explore_weight
            )));
        }
        if self.vns_iters == 0 {
            return Err(PlannerError::InvalidMoon("vns_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlannerKind {
    Moon(MoonConfig),
    Frontier,
    TspLandmarks,
}

impl PlannerKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlannerKind::Moon(_) => "moon",
            PlannerKind::Frontier => "frontier",
            PlannerKind::TspLandmarks => "tsp",
        }
    }
}

impl FromStr for PlannerKind {
    type Err = PlannerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "moon" => Ok(PlannerKind::Moon(MoonConfig::default())),
            "frontier" => Ok(PlannerKind::Frontier),
            "tsp" | "tsp-landmarks" => Ok(PlannerKind::TspLandmarks),
            _ => Err(PlannerError::Unknown(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeConfig {
    pub sensors: SensorConfig,
    /// Defaults to [`default_step_cap`].
    pub step_cap: Option<usize>,
    /// Seeds the VNS solver.
    pub seed: u64,
    /// Keep every SOP instance and solution MOON produces.
    pub record_plans: bool,
    pub exec: Execution,
}

/// Four times the workspace perimeter in cells.
pub fn default_step_cap(ws: &Workspace) -> usize {
    4 * 2 * (ws.width_cells() + ws.height_cells())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FailReason {
    StepCap,
    /// Nothing left to explore or exploit.
    Exhausted,
    /// The single plan of a no-replan run was used up.
    PlanExhausted,
    Unreachable { from: Cell, to: Cell },
    Solver(String),
}

impl FailReason {
    pub fn label(&self) -> String {
        match self {
            FailReason::StepCap => "step-cap".into(),
            FailReason::Exhausted => "exhausted".into(),
            FailReason::PlanExhausted => "plan-exhausted".into(),
            FailReason::Unreachable { from, to } => {
                format!("unreachable {},{}->{},{}", from.x, from.y, to.x, to.y)
            }
            FailReason::Solver(m) => format!("solver {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decision {
    Goto(Cell),
    Fail(FailReason),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub event: String,
}

/// A SOP solution being executed, with its nodes resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivePlan {
    pub solution: SopSolution,
    /// `nodes[i]` is the graph node of `solution.path[i]`.
    pub nodes: Vec<Node>,
    /// Index of the next node to reach.
    pub progress: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanRecord {
    pub step: usize,
    pub problem: PlanningProblem,
    pub solution: SopSolution,
}

#[derive(Clone, Debug)]
pub struct EpisodeState {
    pub belief: BeliefMap,
    pub robot: Pose,
    pub traveled_m: f64,
    pub step: usize,
    pub step_cap: usize,
    pub current_plan: Option<ActivePlan>,
    pub replans: usize,
    pub plans: Vec<PlanRecord>,
    pub trajectory: Vec<TrajectoryRow>,
    pub short_range_m: f64,
    pub viewpoint_radius_m: f64,
    pub seed: u64,
    pub exec: Execution,
    record_plans: bool,
    /// Landmarks appeared since the last plan was made.
    new_landmarks: bool,
    frontier_goal: Option<Cell>,
    tour: Vec<Node>,
    /// Remaining cells toward `route_goal`, last cell first.
    route: Vec<Cell>,
    route_goal: Option<Cell>,
}

impl EpisodeState {
    /// Places the robot at the start pose and runs the first observation.
    pub fn start(ws: &Workspace, placement: &EntityPlacement, cfg: &EpisodeConfig) -> Self {
        let belief = BeliefMap::new(ws);
        let robot = belief.center(belief.cell_of(&placement.start));
        let mut state = EpisodeState {
            belief,
            robot,
            traveled_m: 0.0,
            step: 0,
            step_cap: cfg.step_cap.unwrap_or_else(|| default_step_cap(ws)),
            current_plan: None,
            replans: 0,
            plans: Vec::new(),
            trajectory: Vec::new(),
            short_range_m: cfg.sensors.short_range_m,
            viewpoint_radius_m: viewpoint_radius(cfg.sensors.short_range_m, ws.resolution_m),
            seed: cfg.seed,
            exec: cfg.exec,
            record_plans: cfg.record_plans,
            new_landmarks: false,
            frontier_goal: None,
            tour: Vec::new(),
            route: Vec::new(),
            route_goal: None,
        };
        let obs = sense(ws, placement, &mut state.belief, &robot, &cfg.sensors);
        let mut events = vec!["start".to_string()];
        state.absorb(&obs, &mut events);
        state.log(events);
        state
    }

    pub fn robot_cell(&self) -> Cell {
        self.belief.cell_of(&self.robot)
    }

    /// Whether the robot has detected the target and stands within one
    /// cell of it.
    pub fn succeeded(&self) -> bool {
        self.belief
            .target_found
            .is_some_and(|t| self.robot_cell().chebyshev(self.belief.cell_of(&t)) <= 1)
    }

    fn absorb(&mut self, obs: &ObservationEvent, events: &mut Vec<String>) {
        if !obs.new_landmarks.is_empty() {
            self.new_landmarks = true;
            events.push(format!(
                "seen:{}",
                obs.new_landmarks.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(":")
            ));
        }
        if obs.target_detected {
            events.push("detect".into());
        }
        let reach = self.viewpoint_radius_m + 1e-9;
        let near: Vec<usize> = self
            .belief
            .observed_landmarks()
            .filter(|l| !self.belief.is_visited(l.id) && l.pose.distance(&self.robot) <= reach)
            .map(|l| l.id)
            .collect();
        for id in near {
            self.belief.mark_visited(id);
            events.push(format!("visit:{id}"));
        }
    }

    fn log(&mut self, events: Vec<String>) {
        self.trajectory.push(TrajectoryRow {
            step: self.step,
            x: self.robot.x_m,
            y: self.robot.y_m,
            event: events.join("|"),
        });
    }

    fn note(&mut self, event: &str) {
        if let Some(row) = self.trajectory.last_mut() {
            if !row.event.is_empty() {
                row.event.push('|');
            }
            row.event.push_str(event);
        }
    }

    fn known_mask(&self) -> Vec<bool> {
        self.belief.free_mask()
    }
}

/// Outcome of one robot step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepEvent {
    pub moved_m: f64,
    pub observation: ObservationEvent,
}

/// Moves one grid step along a shortest known-free path toward `waypoint`
/// (no motion when already there), then senses.
///
/// The path is planned when the waypoint changes and then followed; cells
/// known to be free stay free, so a cached path never becomes invalid.
pub fn advance(
    state: &mut EpisodeState,
    waypoint: Cell,
    ws: &Workspace,
    placement: &EntityPlacement,
    sensors: &SensorConfig,
) -> Result<StepEvent, FailReason> {
    let here = state.robot_cell();
    let mut moved_m = 0.0;
    let mut events = Vec::new();
    if waypoint != here {
        if state.route_goal != Some(waypoint) || state.route.is_empty() {
            let w = state.belief.width();
            let open = state.known_mask();
            let mask = Mask {
                width: w,
                height: state.belief.height(),
                open: &open,
            };
            let unreachable = FailReason::Unreachable { from: here, to: waypoint };
            let cells = route(&mask, here.y * w + here.x, waypoint.y * w + waypoint.x).ok_or(unreachable)?;
            state.route = cells.into_iter().rev().map(|i| Cell::new(i % w, i / w)).collect();
            state.route_goal = Some(waypoint);
        }
        let next = state.route.pop().expect("route is non-empty");
        let diagonal = next.x != here.x && next.y != here.y;
        moved_m = if diagonal { SQRT_2 } else { 1.0 } * state.belief.resolution_m;
        state.robot = state.belief.center(next);
        state.traveled_m += moved_m;
        events.push("move".to_string());
    } else {
        events.push("idle".to_string());
    }
    state.step += 1;
    let observation = sense(ws, placement, &mut state.belief, &state.robot, sensors);
    state.absorb(&observation, &mut events);
    state.log(events);
    Ok(StepEvent { moved_m, observation })
}

/// Closest known-free cell within one cell of the detected target.
fn approach(state: &EpisodeState) -> Decision {
    let Some(t) = state.belief.target_found else {
        return Decision::Fail(FailReason::Exhausted);
    };
    let tc = state.belief.cell_of(&t);
    let w = state.belief.width();
    let open = state.known_mask();
    let mask = Mask {
        width: w,
        height: state.belief.height(),
        open: &open,
    };
    let here = state.robot_cell();
    match nearest_matching(&mask, here.y * w + here.x, |i| Cell::new(i % w, i / w).chebyshev(tc) <= 1) {
        Some((_, cells)) => Decision::Goto(Cell::new(cells[0] % w, cells[0] / w)),
        None => Decision::Fail(FailReason::Unreachable { from: here, to: tc }),
    }
}

#[derive(Clone, Debug)]
pub struct EpisodeOutcome {
    pub planner: &'static str,
    pub success: bool,
    pub traveled_m: f64,
    pub steps: usize,
    pub failure: Option<FailReason>,
    pub replans: usize,
    pub trajectory: Vec<TrajectoryRow>,
    pub plans: Vec<PlanRecord>,
}

pub fn run_episode(ws: &Workspace, placement: &EntityPlacement, planner: &PlannerKind, cfg: &EpisodeConfig) -> EpisodeOutcome {
    let mut state = EpisodeState::start(ws, placement, cfg);
    let failure = loop {
        if state.succeeded() {
            break None;
        }
        if state.step >= state.step_cap {
            break Some(FailReason::StepCap);
        }
        let decision = if state.belief.target_found.is_some() {
            approach(&state)
        } else {
            match planner {
                PlannerKind::Moon(m) => moon_step(&mut state, m),
                PlannerKind::Frontier => frontier_step(&mut state),
                PlannerKind::TspLandmarks => tsp_step(&mut state),
            }
        };
        match decision {
            Decision::Goto(cell) => {
                if let Err(f) = advance(&mut state, cell, ws, placement, &cfg.sensors) {
                    break Some(f);
                }
            }
            Decision::Fail(f) => break Some(f),
        }
    };
    match &failure {
        None => state.note("success"),
        Some(f) => state.note(&format!("fail:{}", f.label())),
    }
    EpisodeOutcome {
        planner: planner.name(),
        success: failure.is_none(),
        traveled_m: state.traveled_m,
        steps: state.step,
        failure,
        replans: state.replans,
        trajectory: state.trajectory,
        plans: state.plans,
    }
}

/// `step,x,y,event`
pub fn write_trajectory_csv<W: io::Write>(rows: &[TrajectoryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Geometric length of the logged pose sequence.
pub fn trajectory_length(rows: &[TrajectoryRow]) -> f64 {
    rows.windows(2)
        .fold(0.0, |acc, p| acc + (p[1].x - p[0].x).hypot(p[1].y - p[0].y))
}
