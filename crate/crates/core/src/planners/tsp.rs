//! Tour over every known landmark, ignoring any budget.

use super::frontier::frontier_step;
use super::{Decision, EpisodeState};
use crate::navgraph::{build_graph_with, ClusterLabel, CostMatrix, GraphParams, LandmarkExclusion};
use crate::sop::TOLERANCE;

/// Follows a nearest-neighbour + 2-opt open tour over the viewpoints of all
/// observed, unvisited landmarks, rebuilt whenever new landmarks appear.
/// Without such landmarks it explores like the frontier baseline.
pub fn tsp_step(state: &mut EpisodeState) -> Decision {
    let here = state.robot_cell();
    let stale = |s: &EpisodeState, i: usize| match s.tour[i].label {
        ClusterLabel::Landmark(id) => s.belief.is_visited(id) || s.tour[i].cell == here,
        _ => true,
    };
    while !state.tour.is_empty() && stale(state, 0) {
        state.tour.remove(0);
    }
    if state.tour.is_empty() || state.new_landmarks {
        let params = GraphParams {
            viewpoint_radius_m: state.viewpoint_radius_m,
            exclusion: LandmarkExclusion::Visited,
            exec: state.exec,
        };
        let graph = build_graph_with(&state.belief, &state.robot, &params);
        let clusters: Vec<usize> = graph
            .nodes
            .iter()
            .map(|n| match n.label {
                ClusterLabel::Landmark(id) => id + 1,
                _ => 0,
            })
            .collect();
        let path = open_tour(&graph.cost, graph.start_node, &clusters);
        state.tour = path[1..].iter().map(|&i| graph.nodes[i].clone()).collect();
        state.new_landmarks = false;
    }
    match state.tour.first() {
        Some(n) => Decision::Goto(n.cell),
        None => frontier_step(state),
    }
}

/// Open path from `start` through one node of every other cluster:
/// nearest neighbour, then 2-opt, or-opt and member reselection until none
/// improves. Clusters unreachable from the tour are left out.
pub fn open_tour(cost: &CostMatrix, start: usize, clusters: &[usize]) -> Vec<usize> {
    let n = cost.len();
    let k = clusters.iter().copied().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); k];
    for v in 0..n {
        members[clusters[v]].push(v);
    }
    let mut used = vec![false; k];
    used[clusters[start]] = true;
    let mut path = vec![start];
    loop {
        let last = *path.last().unwrap();
        let next = (0..n)
            .filter(|&v| !used[clusters[v]] && cost.get(last, v).is_finite())
            .min_by(|&a, &b| cost.get(last, a).total_cmp(&cost.get(last, b)).then(a.cmp(&b)));
        match next {
            Some(v) => {
                used[clusters[v]] = true;
                path.push(v);
            }
            None => break,
        }
    }
    let mut best = cost.path_cost(&path);
    let eps = |c: f64| TOLERANCE * c.max(1.0);
    loop {
        let mut improved = false;
        for i in 1..path.len() {
            for j in i + 1..path.len() {
                path[i..=j].reverse();
                let c = cost.path_cost(&path);
                if c < best - eps(best) {
                    best = c;
                    improved = true;
                } else {
                    path[i..=j].reverse();
                }
            }
        }
        // Or-opt: move a run of up to three nodes elsewhere.
        for len in 1..=3 {
            for i in 1..path.len() {
                if i + len > path.len() {
                    break;
                }
                for j in 1..=path.len() - len {
                    if j == i {
                        continue;
                    }
                    let mut trial = path.clone();
                    let run: Vec<usize> = trial.drain(i..i + len).collect();
                    trial.splice(j..j, run);
                    let c = cost.path_cost(&trial);
                    if c < best - eps(best) {
                        best = c;
                        path = trial;
                        improved = true;
                    }
                }
            }
        }
        for i in 1..path.len() {
            let old = path[i];
            for &u in &members[clusters[old]] {
                let prev = path[i];
                path[i] = u;
                let c = cost.path_cost(&path);
                if c < best - eps(best) {
                    best = c;
                    improved = true;
                } else {
                    path[i] = prev;
                }
            }
        }
        if !improved {
            return path;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{placement, sensors};
    use super::super::*;
    use super::*;
    use crate::world::Workspace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn euclid(pts: &[(f64, f64)]) -> CostMatrix {
        CostMatrix::from_fn(pts.len(), |i, j| (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1))
    }

    fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permutations(items, k + 1, visit);
            items.swap(k, i);
        }
    }

    #[test]
    fn collinear_points_in_line_order() {
        let pts = [(0.0, 0.0), (30.0, 0.0), (10.0, 0.0), (20.0, 0.0)];
        let c = euclid(&pts);
        assert_eq!(open_tour(&c, 0, &[0, 1, 2, 3]), vec![0, 2, 3, 1]);
    }

    #[test]
    fn six_point_tours_are_near_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..7).map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0))).collect();
            let c = euclid(&pts);
            let got = c.path_cost(&open_tour(&c, 0, &[0, 1, 2, 3, 4, 5, 6]));
            let mut best = f64::INFINITY;
            permutations(&mut (1..7).collect(), 0, &mut |p| {
                let mut path = vec![0];
                path.extend_from_slice(p);
                best = best.min(c.path_cost(&path));
            });
            assert!(got <= best * 1.05 + 1e-9, "{got} vs {best}");
        }
    }

    #[test]
    fn single_landmark_matches_moon() {
        let ws = Workspace::from_text(&vec![".".repeat(30); 30].join("\n"), 1.0).unwrap();
        let pl = placement((2.5, 2.5), (-9.0, -9.0), &[(20.5, 15.5, 1.0)]);
        let cfg = EpisodeConfig {
            sensors: sensors(60.0, 3.0),
            ..Default::default()
        };
        let mut a = EpisodeState::start(&ws, &pl, &cfg);
        let mut b = a.clone();
        let moon = MoonConfig {
            explore_weight: 0.0,
            ..Default::default()
        };
        assert_eq!(tsp_step(&mut a), moon_step(&mut b, &moon));
    }
}
