//! Row-major 2D grids and 8-connected shortest paths.
//!
//! Moves are the eight king moves. An orthogonal move costs one resolution
//! unit and a diagonal move costs `sqrt(2)` units. A diagonal move is only
//! allowed when both orthogonal cells it passes between are passable, so
//! paths never squeeze through the corner where two walls touch.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Integer grid coordinate. Ordered by `(y, x)`, which is the scan order
/// used for every deterministic tie-break in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }

    pub fn chebyshev(self, other: Cell) -> usize {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Grid {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), width * height, "grid data length mismatch");
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        cell.y * self.width + cell.x
    }

    #[inline]
    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn get(&self, cell: Cell) -> Option<&T> {
        if cell.x < self.width && cell.y < self.height {
            self.data.get(self.index(cell))
        } else {
            None
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (Cell, &T)> {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| (Cell::new(i % w, i / w), v))
    }

    /// The four orthogonal neighbours that lie inside the grid.
    pub fn neighbors4(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        const D: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
        D.iter().filter_map(move |&(dx, dy)| {
            let (x, y) = (cell.x as i64 + dx, cell.y as i64 + dy);
            self.contains(x, y).then(|| Cell::new(x as usize, y as usize))
        })
    }

    /// The eight king-move neighbours that lie inside the grid.
    pub fn neighbors8(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        const D: [(i64, i64); 8] = [
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ];
        D.iter().filter_map(move |&(dx, dy)| {
            let (x, y) = (cell.x as i64 + dx, cell.y as i64 + dy);
            self.contains(x, y).then(|| Cell::new(x as usize, y as usize))
        })
    }
}

impl<T> std::ops::Index<Cell> for Grid<T> {
    type Output = T;
    fn index(&self, cell: Cell) -> &T {
        &self.data[cell.y * self.width + cell.x]
    }
}

impl<T> std::ops::IndexMut<Cell> for Grid<T> {
    fn index_mut(&mut self, cell: Cell) -> &mut T {
        &mut self.data[cell.y * self.width + cell.x]
    }
}

/// Passability mask over a grid, indexed like the grid.
pub trait Passable: Sync {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn passable(&self, index: usize) -> bool;
}

/// Plain boolean mask.
pub struct Mask<'a> {
    pub width: usize,
    pub height: usize,
    pub open: &'a [bool],
}

impl Passable for Mask<'_> {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn passable(&self, index: usize) -> bool {
        self.open[index]
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STEPS: [(i64, i64, bool); 8] = [
    (1, 0, false),
    (0, 1, false),
    (-1, 0, false),
    (0, -1, false),
    (1, 1, true),
    (-1, 1, true),
    (-1, -1, true),
    (1, -1, true),
];

/// Calls `visit(neighbor_index, step_length_in_cells)` for every legal move
/// out of `index`.
#[inline]
pub fn for_each_move<P: Passable + ?Sized>(mask: &P, index: usize, mut visit: impl FnMut(usize, f64)) {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let (x, y) = ((index as i64) % w, (index as i64) / w);
    for &(dx, dy, diagonal) in &STEPS {
        let (nx, ny) = (x + dx, y + dy);
        if nx < 0 || ny < 0 || nx >= w || ny >= h {
            continue;
        }
        let ni = (ny * w + nx) as usize;
        if !mask.passable(ni) {
            continue;
        }
        if diagonal {
            let side_a = (y * w + nx) as usize;
            let side_b = (ny * w + x) as usize;
            if !mask.passable(side_a) || !mask.passable(side_b) {
                continue;
            }
            visit(ni, SQRT_2);
        } else {
            visit(ni, 1.0);
        }
    }
}

/// Single-source Dijkstra over passable cells; distances in cell units.
///
/// When `targets` is given the search stops as soon as every target is
/// settled; distances of cells beyond that frontier are left at infinity
/// or at an upper bound. Impassable sources yield an all-infinite field.
pub fn distance_field<P: Passable + ?Sized>(
    mask: &P,
    source: usize,
    targets: Option<&[usize]>,
) -> Vec<f64> {
    let n = mask.width() * mask.height();
    let mut dist = vec![f64::INFINITY; n];
    if source >= n || !mask.passable(source) {
        return dist;
    }
    let mut settled = vec![false; n];
    let mut pending = match targets {
        Some(t) => {
            let mut want = vec![false; n];
            let mut count = 0;
            for &i in t {
                if i < n && !want[i] {
                    want[i] = true;
                    count += 1;
                }
            }
            Some((want, count))
        }
        None => None,
    };
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        index: source,
    });
    while let Some(Entry { dist: d, index }) = heap.pop() {
        if settled[index] {
            continue;
        }
        settled[index] = true;
        if let Some((want, count)) = pending.as_mut() {
            if want[index] {
                *count -= 1;
                if *count == 0 {
                    break;
                }
            }
        }
        for_each_move(mask, index, |ni, step| {
            let nd = d + step;
            if nd < dist[ni] {
                dist[ni] = nd;
                heap.push(Entry { dist: nd, index: ni });
            }
        });
    }
    dist
}

/// Nearest cells (by path length from `source`) that satisfy `goal`.
///
/// Returns every goal cell settled at the minimum distance, in ascending
/// index order, together with that distance in cell units.
pub fn nearest_matching<P: Passable + ?Sized>(
    mask: &P,
    source: usize,
    goal: impl Fn(usize) -> bool,
) -> Option<(f64, Vec<usize>)> {
    const TIE: f64 = 1e-9;
    let n = mask.width() * mask.height();
    if source >= n || !mask.passable(source) {
        return None;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        index: source,
    });
    let mut best: Option<(f64, Vec<usize>)> = None;
    while let Some(Entry { dist: d, index }) = heap.pop() {
        if settled[index] {
            continue;
        }
        if let Some((bd, _)) = &best {
            if d > bd + TIE {
                break;
            }
        }
        settled[index] = true;
        if goal(index) {
            match best.as_mut() {
                Some((_, found)) => found.push(index),
                None => best = Some((d, vec![index])),
            }
        }
        for_each_move(mask, index, |ni, step| {
            let nd = d + step;
            if nd < dist[ni] {
                dist[ni] = nd;
                heap.push(Entry { dist: nd, index: ni });
            }
        });
    }
    best.map(|(d, mut found)| {
        found.sort_unstable();
        (d, found)
    })
}

/// Shortest route from `from` to `to` as a list of cell indices, excluding
/// `from` and including `to`. `None` when unreachable.
///
/// Ties between equally short routes are resolved by always stepping to the
/// lowest-index neighbour that stays on a shortest route.
pub fn route<P: Passable + ?Sized>(mask: &P, from: usize, to: usize) -> Option<Vec<usize>> {
    const TIE: f64 = 1e-9;
    if from == to {
        return mask.passable(from).then(Vec::new);
    }
    let field = distance_field(mask, to, Some(&[from]));
    if !field[from].is_finite() {
        return None;
    }
    let mut path = Vec::new();
    let mut here = from;
    while here != to {
        let mut next: Option<usize> = None;
        for_each_move(mask, here, |ni, step| {
            if (field[ni] + step - field[here]).abs() <= TIE && next.is_none_or(|b| ni < b) {
                next = Some(ni);
            }
        });
        here = next?;
        path.push(here);
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> (usize, usize, Vec<bool>) {
        let h = rows.len();
        let w = rows[0].len();
        let open = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c != '#'))
            .collect();
        (w, h, open)
    }

    #[test]
    fn straight_and_diagonal_steps() {
        let (w, h, open) = mask_from(&[".....", ".....", "....."]);
        let m = Mask { width: w, height: h, open: &open };
        let d = distance_field(&m, 0, None);
        assert_eq!(d[1], 1.0);
        assert!((d[w + 1] - SQRT_2).abs() < 1e-12);
        assert!((d[2 * w + 4] - (2.0 * SQRT_2 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn no_corner_cutting() {
        // The diagonal from (0,1) to (1,0) squeezes between two walls.
        let (w, h, open) = mask_from(&["#.", ".#"]);
        let m = Mask { width: w, height: h, open: &open };
        let d = distance_field(&m, w, None);
        assert!(d[1].is_infinite());
    }

    #[test]
    fn route_follows_distance_field() {
        let (w, h, open) = mask_from(&[".....", ".###.", "....."]);
        let m = Mask { width: w, height: h, open: &open };
        let r = route(&m, 0, 2 * w).unwrap();
        assert_eq!(r, vec![w, 2 * w]);
        let r = route(&m, w, w + 4).unwrap();
        assert_eq!(*r.last().unwrap(), w + 4);
        let len: f64 = std::iter::once(w)
            .chain(r.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|p| if p[0].abs_diff(p[1]) == 1 || p[0].abs_diff(p[1]) == w { 1.0 } else { SQRT_2 })
            .sum();
        let field = distance_field(&m, w, None);
        assert!((len - field[w + 4]).abs() < 1e-12);
    }

    #[test]
    fn nearest_matching_reports_ties() {
        let (w, h, open) = mask_from(&["....."]);
        let m = Mask { width: w, height: h, open: &open };
        let (d, found) = nearest_matching(&m, 2, |i| i == 0 || i == 4).unwrap();
        assert_eq!(d, 2.0);
        assert_eq!(found, vec![0, 4]);
    }

    #[test]
    fn cell_order_is_row_major() {
        let mut cells = vec![Cell::new(3, 0), Cell::new(0, 1), Cell::new(1, 0)];
        cells.sort();
        assert_eq!(cells, vec![Cell::new(1, 0), Cell::new(3, 0), Cell::new(0, 1)]);
    }
}
