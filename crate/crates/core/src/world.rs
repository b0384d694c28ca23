//! Ground-truth environment: a walled grid of rooms, landmarks, a target and
//! a start pose.
//!
//! The workspace is partitioned into an irregular grid of rectangular rooms
//! separated by one-cell walls. Every room side carries a door of
//! `door_width_cells` cells, so the free space is connected by construction.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Cell, Grid};

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("invalid world parameters: {0}")]
    InvalidParams(String),
    #[error("rooms of at least {room_m} m do not fit in a {extent_m} m workspace")]
    RoomsDoNotFit { room_m: f64, extent_m: f64 },
    #[error("not enough free space: {0}")]
    InsufficientSpace(String),
    #[error("malformed grid text: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Free,
    Wall,
}

/// Continuous position in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x_m: f64,
    pub y_m: f64,
}

impl Pose {
    pub const fn new(x_m: f64, y_m: f64) -> Self {
        Pose { x_m, y_m }
    }

    /// Center of `cell`.
    pub fn from_cell(cell: Cell, resolution_m: f64) -> Self {
        Pose {
            x_m: (cell.x as f64 + 0.5) * resolution_m,
            y_m: (cell.y as f64 + 0.5) * resolution_m,
        }
    }

    pub fn distance(&self, other: &Pose) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    North,
    East,
    South,
    West,
}

/// A gap in a wall: `len` cells starting at `start`, running along the wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Door {
    pub side: Side,
    pub start: Cell,
    pub len: usize,
}

/// Room bounded by the wall lines `x0`, `x1`, `y0`, `y1` (inclusive).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
    pub doors: Vec<Door>,
}

impl Room {
    pub fn has_door(&self, side: Side) -> bool {
        self.doors.iter().any(|d| d.side == side)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldParams {
    pub width_m: f64,
    pub height_m: f64,
    pub resolution_m: f64,
    /// Wall-to-wall room extent range.
    pub room_min_m: f64,
    pub room_max_m: f64,
    pub door_width_cells: usize,
}

impl Default for WorldParams {
    fn default() -> Self {
        WorldParams {
            width_m: 300.0,
            height_m: 300.0,
            resolution_m: 1.0,
            room_min_m: 20.0,
            room_max_m: 40.0,
            door_width_cells: 2,
        }
    }
}

impl WorldParams {
    /// Small square workspace for quick experiments.
    pub fn desk_scale(side_m: f64) -> Self {
        WorldParams {
            width_m: side_m,
            height_m: side_m,
            room_min_m: 10.0,
            room_max_m: 20.0,
            ..WorldParams::default()
        }
    }

    fn cells_along(&self, extent_m: f64) -> Result<usize, WorldError> {
        let cells = extent_m / self.resolution_m;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-9 || rounded < 1.0 {
            return Err(WorldError::InvalidParams(format!(
                "resolution {} m does not divide extent {} m",
                self.resolution_m, extent_m
            )));
        }
        Ok(rounded as usize)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        let positive = [
            self.width_m,
            self.height_m,
            self.resolution_m,
            self.room_min_m,
            self.room_max_m,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(WorldError::InvalidParams("sizes must be positive".into()));
        }
        if self.room_min_m > self.room_max_m {
            return Err(WorldError::InvalidParams("room_min_m > room_max_m".into()));
        }
        if self.door_width_cells == 0 {
            return Err(WorldError::InvalidParams("door_width_cells must be >= 1".into()));
        }
        let min_cells = (self.room_min_m / self.resolution_m).ceil() as usize;
        if min_cells < self.door_width_cells + 2 {
            return Err(WorldError::InvalidParams(format!(
                "rooms of {} m cannot hold a {}-cell door",
                self.room_min_m, self.door_width_cells
            )));
        }
        for extent in [self.width_m, self.height_m] {
            let cells = self.cells_along(extent)?;
            if cells < min_cells + 1 {
                return Err(WorldError::RoomsDoNotFit {
                    room_m: self.room_min_m,
                    extent_m: extent,
                });
            }
        }
        Ok(())
    }
}

/// Ground-truth occupancy grid. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub width_m: f64,
    pub height_m: f64,
    pub resolution_m: f64,
    pub cells: Grid<CellKind>,
    pub rooms: Vec<Room>,
    pub seed: u64,
}

/// Wall-line positions along one axis: `0`, interior cuts, `cells - 1`.
fn wall_lines(rng: &mut ChaCha8Rng, cells: usize, min: usize, max: usize) -> Vec<usize> {
    let last = cells - 1;
    let mut lines = vec![0];
    loop {
        let here = *lines.last().unwrap();
        let remaining = last - here;
        if remaining <= max {
            lines.push(last);
            break;
        }
        let hi = max.min(remaining - min);
        if hi < min {
            // No split leaves both parts in range; keep one oversize room.
            lines.push(last);
            break;
        }
        lines.push(here + rng.gen_range(min..=hi));
    }
    lines
}

pub fn generate_workspace(seed: u64, params: &WorldParams) -> Result<Workspace, WorldError> {
    params.validate()?;
    let w = params.cells_along(params.width_m)?;
    let h = params.cells_along(params.height_m)?;
    let min = (params.room_min_m / params.resolution_m).ceil() as usize;
    let max = ((params.room_max_m / params.resolution_m).floor() as usize).max(min);
    let door = params.door_width_cells;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = wall_lines(&mut rng, w, min, max);
    let ys = wall_lines(&mut rng, h, min, max);

    let mut cells = Grid::filled(w, h, CellKind::Free);
    for &x in &xs {
        for y in 0..h {
            cells[Cell::new(x, y)] = CellKind::Wall;
        }
    }
    for &y in &ys {
        for x in 0..w {
            cells[Cell::new(x, y)] = CellKind::Wall;
        }
    }

    // One door per wall segment; a segment is shared by the two rooms it
    // separates, or belongs to a single room on the outer boundary.
    let mut vertical_doors = vec![vec![0usize; ys.len() - 1]; xs.len()];
    for (i, &x) in xs.iter().enumerate() {
        for j in 0..ys.len() - 1 {
            let start = rng.gen_range(ys[j] + 1..=ys[j + 1] - door);
            vertical_doors[i][j] = start;
            for y in start..start + door {
                cells[Cell::new(x, y)] = CellKind::Free;
            }
        }
    }
    let mut horizontal_doors = vec![vec![0usize; xs.len() - 1]; ys.len()];
    for (j, &y) in ys.iter().enumerate() {
        for i in 0..xs.len() - 1 {
            let start = rng.gen_range(xs[i] + 1..=xs[i + 1] - door);
            horizontal_doors[j][i] = start;
            for x in start..start + door {
                cells[Cell::new(x, y)] = CellKind::Free;
            }
        }
    }

    let mut rooms = Vec::with_capacity((xs.len() - 1) * (ys.len() - 1));
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            let doors = vec![
                Door {
                    side: Side::North,
                    start: Cell::new(horizontal_doors[j][i], ys[j]),
                    len: door,
                },
                Door {
                    side: Side::East,
                    start: Cell::new(xs[i + 1], vertical_doors[i + 1][j]),
                    len: door,
                },
                Door {
                    side: Side::South,
                    start: Cell::new(horizontal_doors[j + 1][i], ys[j + 1]),
                    len: door,
                },
                Door {
                    side: Side::West,
                    start: Cell::new(xs[i], vertical_doors[i][j]),
                    len: door,
                },
            ];
            rooms.push(Room {
                x0: xs[i],
                x1: xs[i + 1],
                y0: ys[j],
                y1: ys[j + 1],
                doors,
            });
        }
    }

    Ok(Workspace {
        width_m: w as f64 * params.resolution_m,
        height_m: h as f64 * params.resolution_m,
        resolution_m: params.resolution_m,
        cells,
        rooms,
        seed,
    })
}

impl Workspace {
    pub fn width_cells(&self) -> usize {
        self.cells.width()
    }

    pub fn height_cells(&self) -> usize {
        self.cells.height()
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.cells.get(cell) == Some(&CellKind::Free)
    }

    pub fn in_bounds(&self, pose: &Pose) -> bool {
        pose.x_m >= 0.0 && pose.y_m >= 0.0 && pose.x_m < self.width_m && pose.y_m < self.height_m
    }

    /// Grid cell containing `pose` (clamped to the grid).
    pub fn cell_of(&self, pose: &Pose) -> Cell {
        let x = (pose.x_m / self.resolution_m).floor().max(0.0) as usize;
        let y = (pose.y_m / self.resolution_m).floor().max(0.0) as usize;
        Cell::new(x.min(self.width_cells() - 1), y.min(self.height_cells() - 1))
    }

    pub fn center(&self, cell: Cell) -> Pose {
        Pose::from_cell(cell, self.resolution_m)
    }

    pub fn free_cells(&self) -> Vec<Cell> {
        self.cells
            .iter_cells()
            .filter(|(_, k)| **k == CellKind::Free)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn wall_fraction(&self) -> f64 {
        let walls = self.cells.as_slice().iter().filter(|k| **k == CellKind::Wall).count();
        walls as f64 / self.cells.len() as f64
    }

    pub fn free_mask(&self) -> Vec<bool> {
        self.cells.as_slice().iter().map(|k| *k == CellKind::Free).collect()
    }

    /// Plain-text dump: one line per row (y ascending), `.` free, `#` wall.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() + self.height_cells());
        for y in 0..self.height_cells() {
            for x in 0..self.width_cells() {
                out.push(match self.cells[Cell::new(x, y)] {
                    CellKind::Free => '.',
                    CellKind::Wall => '#',
                });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`Workspace::to_text`] format. The result has no rooms.
    pub fn from_text(text: &str, resolution_m: f64) -> Result<Workspace, WorldError> {
        let rows: Vec<&str> = text.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
        if rows.is_empty() {
            return Err(WorldError::Parse("empty grid".into()));
        }
        let w = rows[0].chars().count();
        let mut data = Vec::with_capacity(w * rows.len());
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != w {
                return Err(WorldError::Parse(format!("row {y} has a different width")));
            }
            for ch in row.chars() {
                data.push(match ch {
                    '.' => CellKind::Free,
                    '#' => CellKind::Wall,
                    other => return Err(WorldError::Parse(format!("unexpected {other:?}"))),
                });
            }
        }
        let h = rows.len();
        Ok(Workspace {
            width_m: w as f64 * resolution_m,
            height_m: h as f64 * resolution_m,
            resolution_m,
            cells: Grid::from_vec(w, h, data),
            rooms: Vec::new(),
            seed: 0,
        })
    }
}

impl fmt::Display for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub id: usize,
    pub pose: Pose,
    pub relevance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntityPlacement {
    pub landmarks: Vec<Landmark>,
    pub target: Pose,
    pub start: Pose,
    /// Landmark the target was placed next to, if any.
    pub anchor: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetPlacement {
    /// Target on a free cell adjacent (8-neighbourhood) to one landmark.
    NearLandmark,
    /// Target on any free cell.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelevanceMode {
    /// Every landmark has relevance 1.
    Uniform,
    /// Relevance drawn from [0.5, 1.0]; the target anchor is drawn with
    /// probability proportional to relevance.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementParams {
    /// Minimum landmark separation in cells.
    pub min_separation_cells: f64,
    pub target: TargetPlacement,
    pub relevance: RelevanceMode,
    /// Start must be farther than this from the target.
    pub start_exclusion_m: f64,
}

impl Default for PlacementParams {
    fn default() -> Self {
        PlacementParams {
            min_separation_cells: 2.0,
            target: TargetPlacement::NearLandmark,
            relevance: RelevanceMode::Uniform,
            start_exclusion_m: 3.0,
        }
    }
}

pub fn place_entities(seed: u64, ws: &Workspace, m: usize) -> Result<EntityPlacement, WorldError> {
    place_entities_with(seed, ws, m, &PlacementParams::default())
}

pub fn place_entities_with(
    seed: u64,
    ws: &Workspace,
    m: usize,
    params: &PlacementParams,
) -> Result<EntityPlacement, WorldError> {
    let free = ws.free_cells();
    if free.len() < m + 2 {
        return Err(WorldError::InsufficientSpace(format!(
            "{} free cells for {m} landmarks, a target and a start",
            free.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let res = ws.resolution_m;
    let min_sep = params.min_separation_cells * res;
    let max_attempts = 10_000 + 1_000 * m;

    let mut landmarks: Vec<Landmark> = Vec::with_capacity(m);
    let mut taken: HashSet<Cell> = HashSet::new();
    let mut attempts = 0;
    while landmarks.len() < m {
        attempts += 1;
        if attempts > max_attempts {
            return Err(WorldError::InsufficientSpace(format!(
                "could not separate {m} landmarks by {min_sep} m"
            )));
        }
        let cell = *free.choose(&mut rng).unwrap();
        let pose = ws.center(cell);
        if landmarks.iter().any(|l| l.pose.distance(&pose) < min_sep - 1e-9) {
            continue;
        }
        let relevance = match params.relevance {
            RelevanceMode::Uniform => 1.0,
            RelevanceMode::Random => rng.gen_range(0.5..=1.0),
        };
        taken.insert(cell);
        landmarks.push(Landmark {
            id: landmarks.len(),
            pose,
            relevance,
        });
    }

    let near_landmark = params.target == TargetPlacement::NearLandmark && !landmarks.is_empty();
    let (target_cell, anchor) = match near_landmark {
        false => {
            let cell = sample_free(&mut rng, &free, max_attempts, |c| !taken.contains(&c))?;
            (cell, None)
        }
        true => {
            let mut order: Vec<usize> = Vec::with_capacity(m);
            let mut pool: Vec<usize> = (0..m).collect();
            while !pool.is_empty() {
                let total: f64 = pool.iter().map(|&i| landmarks[i].relevance).sum();
                let mut pick = rng.gen_range(0.0..total);
                let mut k = pool.len() - 1;
                for (j, &i) in pool.iter().enumerate() {
                    if pick < landmarks[i].relevance {
                        k = j;
                        break;
                    }
                    pick -= landmarks[i].relevance;
                }
                order.push(pool.remove(k));
            }
            let mut found = None;
            for anchor in order {
                let lc = ws.cell_of(&landmarks[anchor].pose);
                let options: Vec<Cell> = ws
                    .cells
                    .neighbors8(lc)
                    .filter(|c| ws.is_free(*c) && !taken.contains(c))
                    .collect();
                if let Some(c) = options.choose(&mut rng) {
                    found = Some((*c, Some(anchor)));
                    break;
                }
            }
            found.ok_or_else(|| {
                WorldError::InsufficientSpace("no landmark has a free neighbour for the target".into())
            })?
        }
    };
    taken.insert(target_cell);
    let target = ws.center(target_cell);

    let exclusion = params.start_exclusion_m;
    let start_cell = sample_free(&mut rng, &free, max_attempts, |c| {
        !taken.contains(&c) && ws.center(c).distance(&target) > exclusion
    })?;

    Ok(EntityPlacement {
        landmarks,
        target,
        start: ws.center(start_cell),
        anchor,
    })
}

fn sample_free(
    rng: &mut ChaCha8Rng,
    free: &[Cell],
    attempts: usize,
    ok: impl Fn(Cell) -> bool,
) -> Result<Cell, WorldError> {
    for _ in 0..attempts {
        let c = *free.choose(rng).unwrap();
        if ok(c) {
            return Ok(c);
        }
    }
    // Fall back to a scan so sparse-but-possible cases still succeed.
    let options: Vec<Cell> = free.iter().copied().filter(|c| ok(*c)).collect();
    options
        .choose(rng)
        .copied()
        .ok_or_else(|| WorldError::InsufficientSpace("no admissible free cell".into()))
}

/// Visits the cells crossed by the segment `a -> b` (grid units), in order,
/// including both end cells. When the segment passes exactly through a
/// cell corner both side cells are visited. Stops early when `visit`
/// returns `false`; returns whether the walk completed.
pub(crate) fn supercover(
    width: usize,
    height: usize,
    a: (f64, f64),
    b: (f64, f64),
    mut visit: impl FnMut(Cell) -> bool,
) -> bool {
    const EPS: f64 = 1e-9;
    let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
    let (mut x, mut y) = (clamp(a.0, width) as i64, clamp(a.1, height) as i64);
    let (ex, ey) = (clamp(b.0, width) as i64, clamp(b.1, height) as i64);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let sx: i64 = if dx > 0.0 { 1 } else { -1 };
    let sy: i64 = if dy > 0.0 { 1 } else { -1 };
    let t_delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let mut t_max_x = if dx > 0.0 {
        ((x + 1) as f64 - a.0) / dx
    } else if dx < 0.0 {
        (a.0 - x as f64) / -dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy > 0.0 {
        ((y + 1) as f64 - a.1) / dy
    } else if dy < 0.0 {
        (a.1 - y as f64) / -dy
    } else {
        f64::INFINITY
    };
    let in_grid = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height;
    if !visit(Cell::new(x as usize, y as usize)) {
        return false;
    }
    let limit = width + height + 4;
    for _ in 0..2 * limit {
        if x == ex && y == ey {
            return true;
        }
        if (t_max_x - t_max_y).abs() <= EPS {
            // Corner crossing: both side cells are touched.
            for (cx, cy) in [(x + sx, y), (x, y + sy)] {
                if in_grid(cx, cy) && !visit(Cell::new(cx as usize, cy as usize)) {
                    return false;
                }
            }
            x += sx;
            y += sy;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
        } else if t_max_x < t_max_y {
            x += sx;
            t_max_x += t_delta_x;
        } else {
            y += sy;
            t_max_y += t_delta_y;
        }
        if !in_grid(x, y) {
            return true;
        }
        if !visit(Cell::new(x as usize, y as usize)) {
            return false;
        }
    }
    true
}

/// True iff the segment `a -> b` crosses no wall cell (end cells included).
pub fn line_of_sight(ws: &Workspace, a: &Pose, b: &Pose) -> bool {
    let r = ws.resolution_m;
    supercover(
        ws.width_cells(),
        ws.height_cells(),
        (a.x_m / r, a.y_m / r),
        (b.x_m / r, b.y_m / r),
        |c| ws.cells[c] == CellKind::Free,
    )
}

/// True iff nothing but the final cell of `a -> center(cell)` may be a wall:
/// the cell itself is visible even when it is a wall.
pub(crate) fn cell_visible(ws: &Workspace, a: &Pose, cell: Cell) -> bool {
    let r = ws.resolution_m;
    supercover(
        ws.width_cells(),
        ws.height_cells(),
        (a.x_m / r, a.y_m / r),
        (cell.x as f64 + 0.5, cell.y as f64 + 0.5),
        |c| c == cell || ws.cells[c] == CellKind::Free,
    )
}
