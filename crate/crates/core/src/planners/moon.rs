use super::{ActivePlan, Decision, EpisodeState, FailReason, MoonConfig, PlanRecord, ReplanTrigger};
use crate::navgraph::{build_graph_with, make_sop_instance_with, ClusterLabel, GraphParams, NavGraphError, Node};
use crate::sensing::{frontier_clusters, is_frontier_cell};
use crate::sop::{solve_exact_with, solve_vns};

/// Variable-horizon SOP planner. Replans when the current plan runs out
/// and, under [`ReplanTrigger::NewLandmark`], whenever new landmarks have
/// been observed since the last plan; otherwise heads for the next plan
/// node that is still worth reaching.
pub fn moon_step(state: &mut EpisodeState, cfg: &MoonConfig) -> Decision {
    for _ in 0..3 {
        skip_obsolete(state);
        let exhausted = state
            .current_plan
            .as_ref()
            .is_none_or(|p| p.progress >= p.nodes.len());
        let triggered = cfg.replan_trigger == ReplanTrigger::NewLandmark && state.new_landmarks;
        if exhausted || triggered {
            if cfg.replan_trigger == ReplanTrigger::Never && state.replans > 0 {
                return Decision::Fail(FailReason::PlanExhausted);
            }
            if let Err(f) = replan(state, cfg) {
                return Decision::Fail(f);
            }
            continue;
        }
        let plan = state.current_plan.as_ref().unwrap();
        return Decision::Goto(plan.nodes[plan.progress].cell);
    }
    Decision::Fail(FailReason::Exhausted)
}

fn obsolete(state: &EpisodeState, node: &Node) -> bool {
    node.cell == state.robot_cell()
        || match node.label {
            ClusterLabel::Start => true,
            ClusterLabel::Landmark(id) => state.belief.is_visited(id),
            ClusterLabel::Frontier(_) => !is_frontier_cell(&state.belief, node.cell),
        }
}

fn skip_obsolete(state: &mut EpisodeState) {
    let Some(mut plan) = state.current_plan.take() else { return };
    while plan.progress < plan.nodes.len() && obsolete(state, &plan.nodes[plan.progress]) {
        plan.progress += 1;
    }
    state.current_plan = Some(plan);
}

fn replan(state: &mut EpisodeState, cfg: &MoonConfig) -> Result<(), FailReason> {
    let params = GraphParams {
        viewpoint_radius_m: state.viewpoint_radius_m,
        exclusion: cfg.exclusion,
        exec: state.exec,
    };
    let graph = build_graph_with(&state.belief, &state.robot, &params);
    let frontiers = if cfg.explore_weight > 0.0 {
        frontier_clusters(&state.belief)
    } else {
        Vec::new()
    };
    let budget = cfg
        .budget_m
        .unwrap_or((state.step_cap.saturating_sub(state.step)) as f64 * state.belief.resolution_m);
    let problem = match make_sop_instance_with(&state.belief, &graph, budget, &frontiers, cfg.explore_weight, state.exec) {
        Ok(p) => p,
        Err(NavGraphError::NothingToGain) => return Err(FailReason::Exhausted),
        Err(e) => return Err(FailReason::Solver(e.to_string())),
    };
    let inst = &problem.instance;
    let solution = if inst.selectable_clusters() <= cfg.exact_limit {
        solve_exact_with(inst, cfg.exact_limit).map_err(|e| FailReason::Solver(e.to_string()))?
    } else {
        let seed = state.seed ^ ((state.replans as u64) << 32);
        solve_vns(inst, seed, cfg.vns_iters)
    };
    if solution.path.len() <= 1 {
        return Err(FailReason::Exhausted);
    }
    state.replans += 1;
    state.new_landmarks = false;
    state.note("replan");
    let nodes = solution.path.iter().map(|&i| problem.nodes[i].clone()).collect();
    if state.record_plans {
        state.plans.push(PlanRecord {
            step: state.step,
            problem: problem.clone(),
            solution: solution.clone(),
        });
    }
    state.current_plan = Some(ActivePlan {
        solution,
        nodes,
        progress: 1,
    });
    Ok(())
}
