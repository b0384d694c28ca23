//! Sensor models and the incremental belief map.
//!
//! The long-range landmark detector (radius `L`) reveals occupancy and
//! landmarks; the short-range target detector (radius `R`) is the only way
//! to find the target, and also marks the cells it has swept. Knowledge only
//! ever grows: a cell that became known never reverts, and re-observing a
//! landmark adds nothing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io;

use serde::{Deserialize, Serialize};

use crate::grid::{Cell, Grid};
use crate::world::{cell_visible, line_of_sight, CellKind, EntityPlacement, Pose, Workspace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub long_range_m: f64,
    pub short_range_m: f64,
    /// Walls block both sensors when set.
    pub occlusion: bool,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            long_range_m: 100.0,
            short_range_m: 3.0,
            occlusion: true,
        }
    }
}

impl SensorConfig {
    pub fn is_valid(&self) -> bool {
        self.short_range_m > 0.0 && self.long_range_m > self.short_range_m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Knowledge {
    Unknown,
    Free,
    Wall,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedLandmark {
    pub id: usize,
    pub pose: Pose,
    pub relevance: f64,
    /// Index of the `sense` call that first saw the landmark.
    pub observed_step: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationEvent {
    pub newly_revealed_cells: usize,
    pub new_landmarks: Vec<usize>,
    pub target_detected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefMap {
    pub resolution_m: f64,
    known: Grid<Knowledge>,
    searched: Grid<bool>,
    observed: BTreeMap<usize, ObservedLandmark>,
    visited: BTreeSet<usize>,
    pub target_found: Option<Pose>,
    sense_count: usize,
    unknown_cells: usize,
}

impl BeliefMap {
    /// Blank map with the workspace's extent.
    pub fn new(ws: &Workspace) -> Self {
        Self::blank(ws.width_cells(), ws.height_cells(), ws.resolution_m)
    }

    pub fn blank(width: usize, height: usize, resolution_m: f64) -> Self {
        BeliefMap {
            resolution_m,
            known: Grid::filled(width, height, Knowledge::Unknown),
            searched: Grid::filled(width, height, false),
            observed: BTreeMap::new(),
            visited: BTreeSet::new(),
            target_found: None,
            sense_count: 0,
            unknown_cells: width * height,
        }
    }

    pub fn width(&self) -> usize {
        self.known.width()
    }

    pub fn height(&self) -> usize {
        self.known.height()
    }

    pub fn knowledge(&self, cell: Cell) -> Knowledge {
        self.known.get(cell).copied().unwrap_or(Knowledge::Wall)
    }

    pub fn known_grid(&self) -> &Grid<Knowledge> {
        &self.known
    }

    pub fn is_known_free(&self, cell: Cell) -> bool {
        self.knowledge(cell) == Knowledge::Free
    }

    pub fn is_searched(&self, cell: Cell) -> bool {
        self.searched.get(cell).copied().unwrap_or(false)
    }

    pub fn known_count(&self) -> usize {
        self.known.len() - self.unknown_cells
    }

    pub fn searched_count(&self) -> usize {
        self.searched.as_slice().iter().filter(|s| **s).count()
    }

    pub fn sense_count(&self) -> usize {
        self.sense_count
    }

    pub fn cell_of(&self, pose: &Pose) -> Cell {
        let x = (pose.x_m / self.resolution_m).floor().max(0.0) as usize;
        let y = (pose.y_m / self.resolution_m).floor().max(0.0) as usize;
        Cell::new(x.min(self.width() - 1), y.min(self.height() - 1))
    }

    pub fn center(&self, cell: Cell) -> Pose {
        Pose::from_cell(cell, self.resolution_m)
    }

    /// Known-free mask, indexed like the grid.
    pub fn free_mask(&self) -> Vec<bool> {
        self.known.as_slice().iter().map(|k| *k == Knowledge::Free).collect()
    }

    /// Marks a cell; only `Unknown` cells change. Returns whether it did.
    pub fn reveal(&mut self, cell: Cell, kind: CellKind) -> bool {
        let slot = &mut self.known[cell];
        if *slot != Knowledge::Unknown {
            return false;
        }
        *slot = match kind {
            CellKind::Free => Knowledge::Free,
            CellKind::Wall => Knowledge::Wall,
        };
        self.unknown_cells -= 1;
        true
    }

    pub fn mark_searched(&mut self, cell: Cell) {
        self.searched[cell] = true;
    }

    pub fn observed_landmarks(&self) -> impl Iterator<Item = &ObservedLandmark> {
        self.observed.values()
    }

    pub fn observed_landmark(&self, id: usize) -> Option<&ObservedLandmark> {
        self.observed.get(&id)
    }

    pub fn observed_count(&self) -> usize {
        self.observed.len()
    }

    /// Adds a landmark; a repeated observation is ignored. Returns whether
    /// the landmark was new.
    pub fn observe_landmark(&mut self, id: usize, pose: Pose, relevance: f64) -> bool {
        if self.observed.contains_key(&id) {
            return false;
        }
        self.observed.insert(
            id,
            ObservedLandmark {
                id,
                pose,
                relevance,
                observed_step: self.sense_count,
            },
        );
        true
    }

    pub fn visited_landmarks(&self) -> &BTreeSet<usize> {
        &self.visited
    }

    pub fn is_visited(&self, id: usize) -> bool {
        self.visited.contains(&id)
    }

    /// Marks an observed landmark as exploited. Unobserved ids are refused.
    pub fn mark_visited(&mut self, id: usize) -> bool {
        self.observed.contains_key(&id) && self.visited.insert(id)
    }

    /// Plain-text snapshot: `?` unknown, `.` free, `#` wall.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.known.len() + self.height());
        for y in 0..self.height() {
            for x in 0..self.width() {
                out.push(match self.known[Cell::new(x, y)] {
                    Knowledge::Unknown => '?',
                    Knowledge::Free => '.',
                    Knowledge::Wall => '#',
                });
            }
            out.push('\n');
        }
        out
    }

    /// Landmark list as CSV: `id,x,y,relevance,observed_step`.
    pub fn write_landmarks_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "x", "y", "relevance", "observed_step"])?;
        for l in self.observed.values() {
            w.write_record([
                l.id.to_string(),
                l.pose.x_m.to_string(),
                l.pose.y_m.to_string(),
                l.relevance.to_string(),
                l.observed_step.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Cells whose centers lie within `radius_m` of `pose`, row by row.
fn for_each_in_disk(
    width: usize,
    height: usize,
    resolution_m: f64,
    pose: &Pose,
    radius_m: f64,
    mut f: impl FnMut(Cell),
) {
    let r = radius_m / resolution_m;
    let (px, py) = (pose.x_m / resolution_m, pose.y_m / resolution_m);
    let y_lo = (py - r - 0.5).floor().max(0.0) as usize;
    let y_hi = ((py + r - 0.5).ceil().max(0.0) as usize).min(height.saturating_sub(1));
    for y in y_lo..=y_hi {
        let dy = y as f64 + 0.5 - py;
        let span2 = r * r - dy * dy;
        if span2 < 0.0 {
            continue;
        }
        let span = span2.sqrt();
        let x_lo = (px - span - 0.5).ceil().max(0.0) as usize;
        let x_hi_f = (px + span - 0.5).floor();
        if x_hi_f < 0.0 {
            continue;
        }
        let x_hi = (x_hi_f as usize).min(width.saturating_sub(1));
        for x in x_lo..=x_hi {
            f(Cell::new(x, y));
        }
    }
}

/// Runs both detectors at `pose` and folds the result into `belief`.
pub fn sense(
    ws: &Workspace,
    placement: &EntityPlacement,
    belief: &mut BeliefMap,
    pose: &Pose,
    cfg: &SensorConfig,
) -> ObservationEvent {
    belief.sense_count += 1;
    let (w, h, res) = (ws.width_cells(), ws.height_cells(), ws.resolution_m);
    let mut event = ObservationEvent::default();

    if belief.unknown_cells > 0 {
        let mut revealed = 0;
        for_each_in_disk(w, h, res, pose, cfg.long_range_m, |cell| {
            if belief.known[cell] != Knowledge::Unknown {
                return;
            }
            if cfg.occlusion && !cell_visible(ws, pose, cell) {
                return;
            }
            if belief.reveal(cell, ws.cells[cell]) {
                revealed += 1;
            }
        });
        event.newly_revealed_cells = revealed;
    }

    for_each_in_disk(w, h, res, pose, cfg.short_range_m, |cell| {
        if belief.searched[cell] {
            return;
        }
        if cfg.occlusion && !cell_visible(ws, pose, cell) {
            return;
        }
        belief.searched[cell] = true;
    });

    for lm in &placement.landmarks {
        if belief.observed.contains_key(&lm.id) || pose.distance(&lm.pose) > cfg.long_range_m {
            continue;
        }
        if cfg.occlusion && !line_of_sight(ws, pose, &lm.pose) {
            continue;
        }
        if belief.observe_landmark(lm.id, lm.pose, lm.relevance) {
            event.new_landmarks.push(lm.id);
        }
    }

    let target = placement.target;
    if pose.distance(&target) <= cfg.short_range_m
        && (!cfg.occlusion || line_of_sight(ws, pose, &target))
    {
        event.target_detected = true;
        belief.target_found = Some(target);
    }
    event
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierCluster {
    pub cells: Vec<Cell>,
    pub centroid: Pose,
    pub size: usize,
    /// Member cell closest to the centroid (ties: lowest `(y, x)`).
    pub anchor: Cell,
}

/// Occupancy frontier: known-free cells 4-adjacent to an unknown cell,
/// grouped into 8-connected clusters.
pub fn frontier_clusters(belief: &BeliefMap) -> Vec<FrontierCluster> {
    let grid = &belief.known;
    clusters_where(belief, |cell| {
        grid[cell] == Knowledge::Free
            && grid.neighbors4(cell).any(|n| grid[n] == Knowledge::Unknown)
    })
}

/// Search frontier: swept known-free cells 4-adjacent to a cell the target
/// detector has not swept yet and that is not a known wall.
pub fn search_frontier_clusters(belief: &BeliefMap) -> Vec<FrontierCluster> {
    let grid = &belief.known;
    let searched = &belief.searched;
    clusters_where(belief, |cell| {
        searched[cell]
            && grid[cell] == Knowledge::Free
            && grid
                .neighbors4(cell)
                .any(|n| !searched[n] && grid[n] != Knowledge::Wall)
    })
}

pub fn is_frontier_cell(belief: &BeliefMap, cell: Cell) -> bool {
    let grid = &belief.known;
    grid.get(cell) == Some(&Knowledge::Free)
        && grid.neighbors4(cell).any(|n| grid[n] == Knowledge::Unknown)
}

pub fn is_search_frontier_cell(belief: &BeliefMap, cell: Cell) -> bool {
    let grid = &belief.known;
    belief.is_searched(cell)
        && grid[cell] == Knowledge::Free
        && grid
            .neighbors4(cell)
            .any(|n| !belief.searched[n] && grid[n] != Knowledge::Wall)
}

fn clusters_where(belief: &BeliefMap, is_member: impl Fn(Cell) -> bool) -> Vec<FrontierCluster> {
    let (w, h) = (belief.width(), belief.height());
    let mut member = Grid::filled(w, h, false);
    for y in 0..h {
        for x in 0..w {
            let c = Cell::new(x, y);
            if is_member(c) {
                member[c] = true;
            }
        }
    }
    let mut seen = Grid::filled(w, h, false);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let seed = Cell::new(x, y);
            if !member[seed] || seen[seed] {
                continue;
            }
            let mut cells = Vec::new();
            let mut queue = VecDeque::from([seed]);
            seen[seed] = true;
            while let Some(c) = queue.pop_front() {
                cells.push(c);
                for n in member.neighbors8(c) {
                    if member[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
            cells.sort();
            out.push(make_cluster(cells, belief.resolution_m));
        }
    }
    out
}

fn make_cluster(cells: Vec<Cell>, resolution_m: f64) -> FrontierCluster {
    let n = cells.len() as f64;
    let (sx, sy) = cells
        .iter()
        .fold((0.0, 0.0), |(sx, sy), c| (sx + c.x as f64 + 0.5, sy + c.y as f64 + 0.5));
    let (cx, cy) = (sx / n, sy / n);
    let anchor = *cells
        .iter()
        .min_by(|a, b| {
            let da = (a.x as f64 + 0.5 - cx).powi(2) + (a.y as f64 + 0.5 - cy).powi(2);
            let db = (b.x as f64 + 0.5 - cx).powi(2) + (b.y as f64 + 0.5 - cy).powi(2);
            da.total_cmp(&db).then_with(|| a.cmp(b))
        })
        .expect("clusters are non-empty");
    FrontierCluster {
        size: cells.len(),
        centroid: Pose::new(cx * resolution_m, cy * resolution_m),
        anchor,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Landmark;

    fn open_field(n: usize) -> Workspace {
        let row = ".".repeat(n);
        Workspace::from_text(&vec![row; n].join("\n"), 1.0).unwrap()
    }

    fn placement(landmarks: &[(f64, f64)], target: (f64, f64)) -> EntityPlacement {
        EntityPlacement {
            landmarks: landmarks
                .iter()
                .enumerate()
                .map(|(id, &(x, y))| Landmark {
                    id,
                    pose: Pose::new(x, y),
                    relevance: 1.0,
                })
                .collect(),
            target: Pose::new(target.0, target.1),
            start: Pose::new(0.5, 0.5),
            anchor: None,
        }
    }

    #[test]
    fn repeated_sense_gains_nothing() {
        let ws = open_field(30);
        let pl = placement(&[(20.5, 20.5)], (29.5, 29.5));
        let mut b = BeliefMap::new(&ws);
        let cfg = SensorConfig {
            long_range_m: 25.0,
            short_range_m: 3.0,
            occlusion: true,
        };
        let first = sense(&ws, &pl, &mut b, &Pose::new(10.5, 10.5), &cfg);
        assert!(first.newly_revealed_cells > 0);
        assert_eq!(first.new_landmarks, vec![0]);
        let second = sense(&ws, &pl, &mut b, &Pose::new(10.5, 10.5), &cfg);
        assert_eq!(second.newly_revealed_cells, 0);
        assert!(second.new_landmarks.is_empty());
        assert!(!b.observe_landmark(0, Pose::new(0.5, 0.5), 2.0));
        assert_eq!(b.observed_landmark(0).unwrap().pose, Pose::new(20.5, 20.5));
    }

    #[test]
    fn disk_counts_match_brute_force() {
        let ws = open_field(40);
        let pose = Pose::new(13.2, 17.9);
        let mut count = 0;
        for_each_in_disk(40, 40, 1.0, &pose, 7.3, |_| count += 1);
        let brute = ws
            .cells
            .iter_cells()
            .filter(|(c, _)| ws.center(*c).distance(&pose) <= 7.3)
            .count();
        assert_eq!(count, brute);
    }

    #[test]
    fn target_detected_within_short_range() {
        let ws = open_field(20);
        let pl = placement(&[], (10.5, 12.5));
        let mut b = BeliefMap::new(&ws);
        let cfg = SensorConfig {
            long_range_m: 10.0,
            short_range_m: 3.0,
            occlusion: false,
        };
        assert!(!sense(&ws, &pl, &mut b, &Pose::new(10.5, 6.5), &cfg).target_detected);
        assert!(b.target_found.is_none());
        assert!(sense(&ws, &pl, &mut b, &Pose::new(10.5, 9.5), &cfg).target_detected);
        assert_eq!(b.target_found, Some(pl.target));
    }

    #[test]
    fn walls_occlude_landmarks_only_when_enabled() {
        // Wall column x = 2; robot at (0,2), landmark at (4,2), 4 m apart.
        let ws = Workspace::from_text("..#..\n..#..\n..#..\n..#..\n..#..\n", 1.0).unwrap();
        let pl = placement(&[(4.5, 2.5)], (4.5, 4.5));
        let robot = Pose::new(0.5, 2.5);
        let mut cfg = SensorConfig {
            long_range_m: 10.0,
            short_range_m: 1.0,
            occlusion: true,
        };
        let mut b = BeliefMap::new(&ws);
        assert!(sense(&ws, &pl, &mut b, &robot, &cfg).new_landmarks.is_empty());
        assert_eq!(b.knowledge(Cell::new(2, 2)), Knowledge::Wall);
        assert_eq!(b.knowledge(Cell::new(4, 2)), Knowledge::Unknown);
        cfg.occlusion = false;
        let mut b = BeliefMap::new(&ws);
        assert_eq!(sense(&ws, &pl, &mut b, &robot, &cfg).new_landmarks, vec![0]);
        assert_eq!(b.known_count(), 25);
    }

    #[test]
    fn frontier_of_revealed_disk() {
        let ws = open_field(41);
        let pl = placement(&[], (40.5, 40.5));
        let mut b = BeliefMap::new(&ws);
        let cfg = SensorConfig {
            long_range_m: 8.0,
            short_range_m: 2.0,
            occlusion: false,
        };
        sense(&ws, &pl, &mut b, &Pose::new(20.5, 20.5), &cfg);
        let clusters = frontier_clusters(&b);
        assert_eq!(clusters.len(), 1);
        let c = &clusters[0];
        assert!(c.centroid.distance(&Pose::new(20.5, 20.5)) < 1e-9);
        for cell in &c.cells {
            assert!(is_frontier_cell(&b, *cell));
        }
    }

    #[test]
    fn fully_known_map_has_no_frontier() {
        let ws = open_field(10);
        let pl = placement(&[], (9.5, 9.5));
        let mut b = BeliefMap::new(&ws);
        let cfg = SensorConfig {
            long_range_m: 50.0,
            short_range_m: 2.0,
            occlusion: false,
        };
        sense(&ws, &pl, &mut b, &Pose::new(5.5, 5.5), &cfg);
        assert!(frontier_clusters(&b).is_empty());
    }

    #[test]
    fn wall_splits_frontier_into_two_arcs() {
        // 7x5 fixture: a known wall row splits the revealed region in two.
        let mut b = BeliefMap::blank(7, 5, 1.0);
        // Row 2 is a known wall across columns 0..=6.
        for x in 0..7 {
            b.reveal(Cell::new(x, 2), CellKind::Wall);
        }
        // Known free: rows 0..=1 and rows 3..=4 of columns 0..=2.
        for y in [0, 1, 3, 4] {
            for x in 0..3 {
                b.reveal(Cell::new(x, y), CellKind::Free);
            }
        }
        // Frontier cells: (2,0),(2,1) above the wall; (2,3),(2,4) below.
        // 8-connectivity cannot link (2,1) and (2,3) across row 2.
        let clusters = frontier_clusters(&b);
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].cells, vec![Cell::new(2, 0), Cell::new(2, 1)]);
        assert_eq!(clusters[1].cells, vec![Cell::new(2, 3), Cell::new(2, 4)]);
        assert_eq!(clusters[0].anchor, Cell::new(2, 0));
    }

    #[test]
    fn visited_requires_observed() {
        let mut b = BeliefMap::blank(3, 3, 1.0);
        assert!(!b.mark_visited(0));
        b.observe_landmark(0, Pose::new(0.5, 0.5), 1.0);
        assert!(b.mark_visited(0));
        assert!(!b.mark_visited(0));
    }

    #[test]
    fn snapshot_formats() {
        let mut b = BeliefMap::blank(2, 1, 1.0);
        b.reveal(Cell::new(0, 0), CellKind::Wall);
        assert_eq!(b.to_text(), "#?\n");
        b.observe_landmark(3, Pose::new(1.5, 0.5), 0.75);
        let mut buf = Vec::new();
        b.write_landmarks_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "id,x,y,relevance,observed_step\n3,1.5,0.5,0.75,0\n");
    }
}
