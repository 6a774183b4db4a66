//! Roadmap tree with parent links and a uniform-grid spatial index
//! (cell size = the neighbor radius, so radius queries scan a 3x3 block).

use crate::geometry::{euclid, Point2};
use crate::safe_interval::SafeInterval;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: usize,
    pub q: Point2,
    pub t_low: f64,
    pub interval: SafeInterval,
    pub interval_idx: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug)]
pub struct Tree {
    vertices: Vec<Vertex>,
    grid: Grid,
    by_key: HashMap<(u64, u64, usize), usize>,
}

impl Tree {
    pub fn new(cell: f64) -> Self {
        Self {
            vertices: Vec::new(),
            grid: Grid::new(cell),
            by_key: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    fn key(q: Point2, interval_idx: usize) -> (u64, u64, usize) {
        (q.x.to_bits(), q.y.to_bits(), interval_idx)
    }

    /// Vertex occupying `(q, interval_idx)` if one exists; at most one per
    /// pair by construction.
    pub fn find(&self, q: Point2, interval_idx: usize) -> Option<usize> {
        self.by_key.get(&Self::key(q, interval_idx)).copied()
    }

    pub fn insert(
        &mut self,
        q: Point2,
        t_low: f64,
        interval: SafeInterval,
        interval_idx: usize,
        parent: Option<usize>,
    ) -> usize {
        let id = self.vertices.len();
        debug_assert!(self.find(q, interval_idx).is_none());
        self.vertices.push(Vertex {
            id,
            q,
            t_low,
            interval,
            interval_idx,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            self.vertices[p].children.push(id);
        }
        self.by_key.insert(Self::key(q, interval_idx), id);
        self.grid.insert(q, id);
        id
    }

    pub fn set_t_low(&mut self, id: usize, t_low: f64) {
        self.vertices[id].t_low = t_low;
    }

    pub fn reparent(&mut self, id: usize, new_parent: usize, new_t_low: f64) {
        if let Some(old) = self.vertices[id].parent {
            let siblings = &mut self.vertices[old].children;
            if let Some(pos) = siblings.iter().position(|&c| c == id) {
                siblings.swap_remove(pos);
            }
        }
        self.vertices[id].parent = Some(new_parent);
        self.vertices[id].t_low = new_t_low;
        self.vertices[new_parent].children.push(id);
    }

    /// Nearest vertex by Euclidean distance; ties broken by lowest id.
    pub fn nearest(&self, q: Point2) -> Option<usize> {
        if self.vertices.is_empty() {
            return None;
        }
        let (cx, cy) = self.grid.cell_of(q);
        let mut best: Option<(f64, usize)> = None;
        let max_ring = self.grid.max_ring_from(cx, cy);
        for k in 0..=max_ring {
            for (gx, gy) in ring_cells(cx, cy, k) {
                if let Some(ids) = self.grid.cells.get(&(gx, gy)) {
                    for &id in ids {
                        let d = euclid(q, self.vertices[id].q);
                        let better = match best {
                            None => true,
                            Some((bd, bid)) => d < bd || (d == bd && id < bid),
                        };
                        if better {
                            best = Some((d, id));
                        }
                    }
                }
            }
            if let Some((d, _)) = best {
                // Cells in ring k+1 lie at distance >= k*cell from q.
                if d <= k as f64 * self.grid.cell {
                    break;
                }
            }
        }
        best.map(|(_, id)| id)
    }

    /// Ids of vertices within the closed ball of `radius` around `q`,
    /// sorted ascending.
    pub fn within(&self, q: Point2, radius: f64) -> Vec<usize> {
        let (cx, cy) = self.grid.cell_of(q);
        let reach = (radius / self.grid.cell).ceil() as i64;
        let mut out = Vec::new();
        for gx in (cx - reach)..=(cx + reach) {
            for gy in (cy - reach)..=(cy + reach) {
                if let Some(ids) = self.grid.cells.get(&(gx, gy)) {
                    for &id in ids {
                        if euclid(q, self.vertices[id].q) <= radius {
                            out.push(id);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Debug)]
struct Grid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    min_cell: (i64, i64),
    max_cell: (i64, i64),
}

impl Grid {
    fn new(cell: f64) -> Self {
        debug_assert!(cell > 0.0);
        Self {
            cell,
            cells: HashMap::new(),
            min_cell: (i64::MAX, i64::MAX),
            max_cell: (i64::MIN, i64::MIN),
        }
    }

    fn cell_of(&self, q: Point2) -> (i64, i64) {
        (
            (q.x / self.cell).floor() as i64,
            (q.y / self.cell).floor() as i64,
        )
    }

    fn insert(&mut self, q: Point2, id: usize) {
        let key = self.cell_of(q);
        self.cells.entry(key).or_default().push(id);
        self.min_cell = (self.min_cell.0.min(key.0), self.min_cell.1.min(key.1));
        self.max_cell = (self.max_cell.0.max(key.0), self.max_cell.1.max(key.1));
    }

    fn max_ring_from(&self, cx: i64, cy: i64) -> i64 {
        let dx = (cx - self.min_cell.0).abs().max((self.max_cell.0 - cx).abs());
        let dy = (cy - self.min_cell.1).abs().max((self.max_cell.1 - cy).abs());
        dx.max(dy)
    }
}

/// Cells at Chebyshev distance `k` from the center, in a fixed order.
fn ring_cells(cx: i64, cy: i64, k: i64) -> Vec<(i64, i64)> {
    if k == 0 {
        return vec![(cx, cy)];
    }
    let mut out = Vec::with_capacity((8 * k) as usize);
    for gx in (cx - k)..=(cx + k) {
        out.push((gx, cy - k));
        out.push((gx, cy + k));
    }
    for gy in (cy - k + 1)..(cy + k) {
        out.push((cx - k, gy));
        out.push((cx + k, gy));
    }
    out
}
