//! Navigation graph over the belief map.
//!
//! Every observed, not yet exploited landmark contributes a cluster of
//! viewpoint nodes: up to four known-free cells, one per compass direction,
//! at most `viewpoint_radius_m` from the landmark. Edge costs are shortest
//! 8-connected path lengths over known-free cells, one Dijkstra run per node.

pub mod instance;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use instance::{CostMatrix, InstanceError, SopInstance};

use crate::grid::{distance_field, Cell, Mask, SQRT_2};
use crate::par::{self, Execution};
use crate::sensing::{BeliefMap, FrontierCluster};
use crate::world::Pose;

#[derive(Debug, Error, PartialEq)]
pub enum NavGraphError {
    #[error("budget must be positive and finite, got {0}")]
    InvalidBudget(f64),
    #[error("explore weight must be finite and >= 0, got {0}")]
    InvalidWeight(f64),
    #[error("no reachable cluster carries any reward")]
    NothingToGain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClusterLabel {
    Start,
    Landmark(usize),
    /// Index into the frontier list passed to [`make_sop_instance`].
    Frontier(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub cell: Cell,
    pub pose: Pose,
    pub label: ClusterLabel,
    pub reward: f64,
    pub detection: f64,
}

/// Which observed landmarks are left out of the graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LandmarkExclusion {
    /// Landmarks already visited.
    #[default]
    Visited,
    /// Visited landmarks and every landmark observed before the most recent
    /// observation batch.
    PreviouslyObserved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphParams {
    pub viewpoint_radius_m: f64,
    pub exclusion: LandmarkExclusion,
    pub exec: Execution,
}

impl GraphParams {
    pub fn for_short_range(short_range_m: f64, resolution_m: f64) -> Self {
        GraphParams {
            viewpoint_radius_m: viewpoint_radius(short_range_m, resolution_m),
            exclusion: LandmarkExclusion::default(),
            exec: Execution::default(),
        }
    }
}

/// Viewpoint offset from a landmark: the largest whole number of cells that
/// keeps every 8-neighbour of the landmark within `short_range_m` of the
/// viewpoint, so standing there sweeps the landmark's neighbourhood.
pub fn viewpoint_radius(short_range_m: f64, resolution_m: f64) -> f64 {
    let k = ((short_range_m - SQRT_2 * resolution_m) / resolution_m + 1e-9).floor();
    let k = if k >= 1.0 {
        k
    } else {
        (short_range_m / resolution_m + 1e-9).floor().min(1.0)
    };
    k.max(0.0) * resolution_m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavGraph {
    pub nodes: Vec<Node>,
    pub cost: CostMatrix,
    pub start_node: usize,
}

impl NavGraph {
    pub fn landmark_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n.label {
                ClusterLabel::Landmark(id) => Some(id),
                _ => None,
            })
            .collect();
        ids.dedup();
        ids
    }
}

pub fn build_graph(belief: &BeliefMap, robot: &Pose, short_range_m: f64) -> NavGraph {
    build_graph_with(belief, robot, &GraphParams::for_short_range(short_range_m, belief.resolution_m))
}

pub fn build_graph_with(belief: &BeliefMap, robot: &Pose, params: &GraphParams) -> NavGraph {
    let (w, h) = (belief.width(), belief.height());
    let open = belief.free_mask();
    let mask = Mask {
        width: w,
        height: h,
        open: &open,
    };
    let robot_cell = belief.cell_of(robot);
    let reach = distance_field(&mask, robot_cell.y * w + robot_cell.x, None);
    let reachable = |c: Cell| reach[c.y * w + c.x].is_finite();

    let mut nodes = vec![Node {
        id: 0,
        cell: robot_cell,
        pose: belief.center(robot_cell),
        label: ClusterLabel::Start,
        reward: 0.0,
        detection: 0.0,
    }];

    let newest = belief.observed_landmarks().map(|l| l.observed_step).max();
    let k = (params.viewpoint_radius_m / belief.resolution_m + 1e-9).floor() as i64;
    for lm in belief.observed_landmarks() {
        if belief.is_visited(lm.id) {
            continue;
        }
        if params.exclusion == LandmarkExclusion::PreviouslyObserved && Some(lm.observed_step) != newest {
            continue;
        }
        let lc = belief.cell_of(&lm.pose);
        let mut picks: Vec<Cell> = Vec::with_capacity(4);
        for (dx, dy) in [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)] {
            for step in (1..=k).rev() {
                let (x, y) = (lc.x as i64 + dx * step, lc.y as i64 + dy * step);
                if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
                    continue;
                }
                let c = Cell::new(x as usize, y as usize);
                if belief.is_known_free(c) && reachable(c) {
                    if !picks.contains(&c) {
                        picks.push(c);
                    }
                    break;
                }
            }
        }
        if picks.is_empty() && belief.is_known_free(lc) && reachable(lc) {
            picks.push(lc);
        }
        for cell in picks {
            nodes.push(Node {
                id: nodes.len(),
                cell,
                pose: belief.center(cell),
                label: ClusterLabel::Landmark(lm.id),
                reward: lm.relevance,
                detection: lm.relevance,
            });
        }
    }

    let cells: Vec<Cell> = nodes.iter().map(|n| n.cell).collect();
    let cost = all_pairs_costs_with(belief, &cells, params.exec);
    NavGraph {
        nodes,
        cost,
        start_node: 0,
    }
}

/// Shortest known-free path lengths (meters) between every pair of cells;
/// infinite when disconnected.
pub fn all_pairs_costs(belief: &BeliefMap, nodes: &[Cell]) -> CostMatrix {
    all_pairs_costs_with(belief, nodes, Execution::default())
}

pub fn all_pairs_costs_with(belief: &BeliefMap, nodes: &[Cell], exec: Execution) -> CostMatrix {
    let (w, h) = (belief.width(), belief.height());
    let open = belief.free_mask();
    let mask = Mask {
        width: w,
        height: h,
        open: &open,
    };
    let index: Vec<usize> = nodes.iter().map(|c| c.y * w + c.x).collect();
    let res = belief.resolution_m;
    // Row i only needs targets j > i; the lower triangle is mirrored.
    let rows: Vec<Vec<f64>> = par::map_range(exec, nodes.len(), |i| {
        let targets = &index[i + 1..];
        if targets.is_empty() {
            return Vec::new();
        }
        let field = distance_field(&mask, index[i], Some(targets));
        targets.iter().map(|&t| field[t] * res).collect()
    });
    let n = nodes.len();
    let mut cost = CostMatrix::new(n);
    for (i, row) in rows.iter().enumerate() {
        if !open[index[i]] {
            // A blocked node reaches nothing, itself included.
            for j in 0..n {
                if j != i {
                    cost.set(i, j, f64::INFINITY);
                    cost.set(j, i, f64::INFINITY);
                }
            }
            continue;
        }
        for (k, &c) in row.iter().enumerate() {
            let j = i + 1 + k;
            cost.set(i, j, c);
            cost.set(j, i, c);
        }
    }
    cost
}

/// Graph plus the per-node and per-cluster bookkeeping needed to map a
/// solver's answer back onto the map.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanningProblem {
    pub instance: SopInstance,
    pub nodes: Vec<Node>,
    /// Label of every cluster index of `instance`.
    pub labels: Vec<ClusterLabel>,
}

/// Turns the landmark graph into a set orienteering instance and appends one
/// single-node pseudo-cluster per frontier cluster, rewarded
/// `explore_weight * size / largest_size`.
pub fn make_sop_instance(
    belief: &BeliefMap,
    graph: &NavGraph,
    budget_m: f64,
    frontiers: &[FrontierCluster],
    explore_weight: f64,
) -> Result<PlanningProblem, NavGraphError> {
    make_sop_instance_with(belief, graph, budget_m, frontiers, explore_weight, Execution::default())
}

pub fn make_sop_instance_with(
    belief: &BeliefMap,
    graph: &NavGraph,
    budget_m: f64,
    frontiers: &[FrontierCluster],
    explore_weight: f64,
    exec: Execution,
) -> Result<PlanningProblem, NavGraphError> {
    if !(budget_m.is_finite() && budget_m > 0.0) {
        return Err(NavGraphError::InvalidBudget(budget_m));
    }
    if !(explore_weight.is_finite() && explore_weight >= 0.0) {
        return Err(NavGraphError::InvalidWeight(explore_weight));
    }
    let mut nodes = graph.nodes.clone();
    let largest = frontiers.iter().map(|f| f.size).max().unwrap_or(0);
    let mut extra: Vec<Node> = Vec::new();
    if explore_weight > 0.0 && largest > 0 {
        for (k, f) in frontiers.iter().enumerate() {
            let reward = explore_weight * f.size as f64 / largest as f64;
            if reward > 0.0 {
                extra.push(Node {
                    id: 0,
                    cell: f.anchor,
                    pose: belief.center(f.anchor),
                    label: ClusterLabel::Frontier(k),
                    reward,
                    detection: 0.0,
                });
            }
        }
    }

    let base = nodes.len();
    let mut cost = graph.cost.clone();
    if !extra.is_empty() {
        let (w, h) = (belief.width(), belief.height());
        let open = belief.free_mask();
        let mask = Mask {
            width: w,
            height: h,
            open: &open,
        };
        let all_cells: Vec<usize> = nodes
            .iter()
            .chain(&extra)
            .map(|n| n.cell.y * w + n.cell.x)
            .collect();
        let res = belief.resolution_m;
        let rows: Vec<Vec<f64>> = par::map(exec, &extra, |node| {
            let src = node.cell.y * w + node.cell.x;
            let field = distance_field(&mask, src, Some(&all_cells));
            all_cells.iter().map(|&t| field[t] * res).collect()
        });
        // Keep only frontier nodes reachable from the start.
        let keep: Vec<usize> = (0..extra.len())
            .filter(|&k| rows[k][graph.start_node].is_finite())
            .collect();
        let n = base + keep.len();
        let mut grown = CostMatrix::new(n);
        for i in 0..base {
            for j in 0..base {
                grown.set(i, j, cost.get(i, j));
            }
        }
        for (a, &k) in keep.iter().enumerate() {
            let i = base + a;
            for j in 0..base {
                grown.set(i, j, rows[k][j]);
                grown.set(j, i, rows[k][j]);
            }
            for (b, &k2) in keep.iter().enumerate() {
                if a != b {
                    let c = rows[k][base + k2].min(rows[k2][base + k]);
                    grown.set(i, base + b, c);
                }
            }
        }
        cost = grown;
        for k in keep {
            nodes.push(extra[k].clone());
        }
    }
    for (i, node) in nodes.iter_mut().enumerate() {
        node.id = i;
    }

    let mut labels: Vec<ClusterLabel> = Vec::new();
    let mut clusters = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let c = match labels.iter().position(|l| *l == node.label) {
            Some(c) => c,
            None => {
                labels.push(node.label);
                labels.len() - 1
            }
        };
        clusters.push(c);
    }
    let total: f64 = labels
        .iter()
        .map(|l| nodes.iter().find(|n| n.label == *l).map_or(0.0, |n| n.reward))
        .sum();
    if total <= 0.0 {
        return Err(NavGraphError::NothingToGain);
    }

    let instance = SopInstance {
        rewards: nodes.iter().map(|n| n.reward).collect(),
        detection: nodes.iter().map(|n| n.detection).collect(),
        clusters,
        cost,
        start: graph.start_node,
        end: None,
        budget: budget_m,
    };
    Ok(PlanningProblem {
        instance,
        nodes,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{frontier_clusters, sense, SensorConfig};
    use crate::world::{EntityPlacement, Landmark, Workspace};

    fn reveal_all(ws: &Workspace, landmarks: &[(f64, f64)]) -> BeliefMap {
        let pl = EntityPlacement {
            landmarks: landmarks
                .iter()
                .enumerate()
                .map(|(id, &(x, y))| Landmark {
                    id,
                    pose: Pose::new(x, y),
                    relevance: 1.0,
                })
                .collect(),
            target: Pose::new(-100.0, -100.0),
            start: Pose::new(0.5, 0.5),
            anchor: None,
        };
        let mut b = BeliefMap::new(ws);
        let cfg = SensorConfig {
            long_range_m: 1e4,
            short_range_m: 1.0,
            occlusion: false,
        };
        sense(ws, &pl, &mut b, &Pose::new(0.5, 0.5), &cfg);
        b
    }

    fn field(n: usize) -> Workspace {
        Workspace::from_text(&vec![".".repeat(n); n].join("\n"), 1.0).unwrap()
    }

    #[test]
    fn viewpoint_radius_values() {
        assert_eq!(viewpoint_radius(3.0, 1.0), 1.0);
        assert_eq!(viewpoint_radius(10.0, 1.0), 8.0);
        assert_eq!(viewpoint_radius(1.0, 1.0), 1.0);
        assert_eq!(viewpoint_radius(0.5, 1.0), 0.0);
    }

    #[test]
    fn empty_belief_gives_start_only() {
        let ws = field(10);
        let b = reveal_all(&ws, &[]);
        let g = build_graph(&b, &Pose::new(2.5, 2.5), 3.0);
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.nodes[0].label, ClusterLabel::Start);
        assert_eq!(g.cost.get(0, 0), 0.0);
    }

    #[test]
    fn one_landmark_in_open_field() {
        let ws = field(20);
        let b = reveal_all(&ws, &[(10.5, 10.5)]);
        let g = build_graph(&b, &Pose::new(2.5, 2.5), 3.0);
        let members: Vec<&Node> = g.nodes.iter().filter(|n| n.label == ClusterLabel::Landmark(0)).collect();
        assert_eq!(members.len(), 4);
        for m in members {
            assert!(m.pose.distance(&Pose::new(10.5, 10.5)) <= 3.0);
            assert_eq!(m.reward, 1.0);
        }
    }

    #[test]
    fn walled_off_landmark_is_absent() {
        // Landmark at (5,1) enclosed by walls; robot at (0,0).
        let ws = Workspace::from_text(
            "....###\n\
             ....#.#\n\
             ....###\n\
             .......\n",
            1.0,
        )
        .unwrap();
        let b = reveal_all(&ws, &[(5.5, 1.5), (1.5, 3.5)]);
        let g = build_graph(&b, &Pose::new(0.5, 0.5), 3.0);
        assert_eq!(g.landmark_ids(), vec![1]);
    }

    #[test]
    fn adjacent_and_detour_costs() {
        let ws = field(5);
        let b = reveal_all(&ws, &[]);
        let c = all_pairs_costs(&b, &[Cell::new(0, 0), Cell::new(1, 0)]);
        assert_eq!(c.get(0, 1), 1.0);
        assert_eq!(c.get(1, 1), 0.0);

        // 5x5 fixture: wall column x = 2 on rows 0..=3, gap at row 4.
        // (0,0) -> (4,0): down to (1,3) [1 + 2 diag? no]. Hand count:
        // (0,0)->(0,1)->(0,2)->(0,3) 3 straight, (0,3)->(1,4) diag,
        // (1,4)->(2,4)->(3,4) 2 straight, (3,4)->(4,3) diag, then
        // (4,3)->(4,2)->(4,1)->(4,0) 3 straight: 8 + 2*sqrt(2).
        let ws = Workspace::from_text("..#..\n..#..\n..#..\n..#..\n.....\n", 1.0).unwrap();
        let b = reveal_all(&ws, &[]);
        let c = all_pairs_costs(&b, &[Cell::new(0, 0), Cell::new(4, 0)]);
        assert!((c.get(0, 1) - (8.0 + 2.0 * SQRT_2)).abs() < 1e-9, "{}", c.get(0, 1));
        assert_eq!(c.get(0, 1), c.get(1, 0));
    }

    #[test]
    fn exploitation_only_rewards_are_relevances() {
        let ws = field(20);
        let b = reveal_all(&ws, &[(10.5, 10.5), (15.5, 3.5)]);
        let g = build_graph(&b, &Pose::new(2.5, 2.5), 3.0);
        let p = make_sop_instance(&b, &g, 100.0, &[], 0.0).unwrap();
        assert_eq!(p.labels, vec![ClusterLabel::Start, ClusterLabel::Landmark(0), ClusterLabel::Landmark(1)]);
        for (i, node) in p.nodes.iter().enumerate() {
            let expect = if node.label == ClusterLabel::Start { 0.0 } else { 1.0 };
            assert_eq!(p.instance.rewards[i], expect);
        }
    }

    #[test]
    fn zero_reward_is_reported() {
        let ws = field(8);
        let b = reveal_all(&ws, &[]);
        let g = build_graph(&b, &Pose::new(2.5, 2.5), 3.0);
        assert_eq!(make_sop_instance(&b, &g, 10.0, &[], 1.0), Err(NavGraphError::NothingToGain));
        assert!(matches!(make_sop_instance(&b, &g, 0.0, &[], 1.0), Err(NavGraphError::InvalidBudget(_))));
    }

    #[test]
    fn frontier_pseudo_clusters() {
        // Robot sees a disk of radius 4 in a 21x21 open field.
        let ws = field(21);
        let pl = EntityPlacement {
            landmarks: vec![],
            target: Pose::new(-9.0, -9.0),
            start: Pose::new(10.5, 10.5),
            anchor: None,
        };
        let mut b = BeliefMap::new(&ws);
        let cfg = SensorConfig {
            long_range_m: 4.0,
            short_range_m: 1.0,
            occlusion: false,
        };
        sense(&ws, &pl, &mut b, &Pose::new(10.5, 10.5), &cfg);
        let fr = frontier_clusters(&b);
        assert_eq!(fr.len(), 1);
        let g = build_graph(&b, &Pose::new(10.5, 10.5), 3.0);
        let p = make_sop_instance(&b, &g, 50.0, &fr, 1.0).unwrap();
        assert_eq!(p.labels, vec![ClusterLabel::Start, ClusterLabel::Frontier(0)]);
        assert_eq!(p.instance.rewards, vec![0.0, 1.0]);
        assert!(p.instance.cost.get(0, 1).is_finite());
    }

    #[test]
    fn frontier_rewards_normalized_by_largest() {
        let ws = field(30);
        let b = reveal_all(&ws, &[(5.5, 5.5), (15.5, 5.5), (25.5, 5.5)]);
        let g = build_graph(&b, &Pose::new(15.5, 20.5), 3.0);
        let mk = |anchor: Cell, size: usize| FrontierCluster {
            cells: vec![anchor],
            centroid: b.center(anchor),
            size,
            anchor,
        };
        let fr = vec![mk(Cell::new(2, 25), 12), mk(Cell::new(27, 25), 30)];
        let p = make_sop_instance(&b, &g, 500.0, &fr, 0.5).unwrap();
        // Hand computation: 0.5 * 12 / 30 = 0.2 and 0.5 * 30 / 30 = 0.5.
        let rewards: Vec<(ClusterLabel, f64)> = p
            .nodes
            .iter()
            .filter(|n| matches!(n.label, ClusterLabel::Frontier(_)))
            .map(|n| (n.label, n.reward))
            .collect();
        assert_eq!(rewards, vec![(ClusterLabel::Frontier(0), 0.2), (ClusterLabel::Frontier(1), 0.5)]);
        assert_eq!(p.labels.len(), 1 + 3 + 2);
        let c = &p.instance.cost;
        for i in 0..c.len() {
            for j in 0..c.len() {
                assert!((c.get(i, j) - c.get(j, i)).abs() < 1e-9);
            }
        }
        p.instance.check().unwrap();
    }

    #[test]
    fn previously_observed_exclusion_keeps_newest_batch() {
        let ws = field(30);
        let mut b = reveal_all(&ws, &[(5.5, 5.5)]);
        b.observe_landmark(7, Pose::new(20.5, 20.5), 1.0);
        // Same batch as landmark 0 because no sense ran in between.
        let mut params = GraphParams::for_short_range(3.0, 1.0);
        params.exclusion = LandmarkExclusion::PreviouslyObserved;
        let g = build_graph_with(&b, &Pose::new(10.5, 10.5), &params);
        assert_eq!(g.landmark_ids(), vec![0, 7]);
    }
}
