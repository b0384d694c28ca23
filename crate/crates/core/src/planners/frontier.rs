//! Nearest-frontier exploration over the target detector's coverage.
//!
//! The frontier here separates cells the short-range detector has swept
//! from those it has not. The robot heads for the nearest such cluster and
//! picks a new one once its goal cell stops being a frontier cell.

use std::collections::VecDeque;

use super::{Decision, EpisodeState, FailReason};
use crate::grid::{nearest_matching, Cell, Mask};
use crate::sensing::is_search_frontier_cell;
use crate::world::Pose;

pub fn frontier_step(state: &mut EpisodeState) -> Decision {
    let here = state.robot_cell();
    if let Some(g) = state.frontier_goal {
        if g != here && is_search_frontier_cell(&state.belief, g) {
            return Decision::Goto(g);
        }
    }
    match nearest_frontier(state) {
        Some(g) => {
            state.frontier_goal = Some(g);
            Decision::Goto(g)
        }
        None => {
            state.frontier_goal = None;
            Decision::Fail(FailReason::Exhausted)
        }
    }
}

/// Closest frontier cell by known-grid path length. Cells tied on distance
/// are ranked by the centroid of their cluster, lowest (y, x) first, then
/// by the cell itself.
pub fn nearest_frontier(state: &EpisodeState) -> Option<Cell> {
    let b = &state.belief;
    let w = b.width();
    let open = b.free_mask();
    let mask = Mask {
        width: w,
        height: b.height(),
        open: &open,
    };
    let here = state.robot_cell();
    let cell = |i: usize| Cell::new(i % w, i / w);
    let (_, tied) = nearest_matching(&mask, here.y * w + here.x, |i| {
        let c = cell(i);
        c != here && is_search_frontier_cell(b, c)
    })?;
    if tied.len() == 1 {
        return Some(cell(tied[0]));
    }
    let mut best: Option<((f64, f64), Cell)> = None;
    let mut assigned: Vec<(Vec<Cell>, (f64, f64))> = Vec::new();
    for &i in &tied {
        let c = cell(i);
        let centroid = match assigned.iter().find(|(cells, _)| cells.binary_search(&c).is_ok()) {
            Some((_, k)) => *k,
            None => {
                let cells = cluster_of(state, c);
                let k = centroid_key(&cells, b.resolution_m);
                assigned.push((cells, k));
                k
            }
        };
        let better = match best {
            None => true,
            Some((k, bc)) => centroid.1.total_cmp(&k.1).then(centroid.0.total_cmp(&k.0)).then(c.cmp(&bc)).is_lt(),
        };
        if better {
            best = Some((centroid, c));
        }
    }
    best.map(|(_, c)| c)
}

/// 8-connected frontier cluster containing `seed`, sorted.
fn cluster_of(state: &EpisodeState, seed: Cell) -> Vec<Cell> {
    let b = &state.belief;
    let (w, h) = (b.width() as i64, b.height() as i64);
    let mut seen = std::collections::HashSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        out.push(c);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (x, y) = (c.x as i64 + dx, c.y as i64 + dy);
                if (dx, dy) == (0, 0) || x < 0 || y < 0 || x >= w || y >= h {
                    continue;
                }
                let n = Cell::new(x as usize, y as usize);
                if !seen.contains(&n) && is_search_frontier_cell(b, n) {
                    seen.insert(n);
                    queue.push_back(n);
                }
            }
        }
    }
    out.sort();
    out
}

/// (x, y) of the cluster centroid in meters.
fn centroid_key(cells: &[Cell], res: f64) -> (f64, f64) {
    let n = cells.len() as f64;
    let p = cells.iter().fold((0.0, 0.0), |acc, c| {
        let q = Pose::from_cell(*c, res);
        (acc.0 + q.x_m, acc.1 + q.y_m)
    });
    (p.0 / n, p.1 / n)
}
