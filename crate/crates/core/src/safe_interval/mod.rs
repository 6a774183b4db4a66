//! Safe-interval algebra: collision/safe interval computation for a disc
//! parked at a configuration, and the earliest-arrival-time solver for a
//! constant-velocity edge among moving obstacles.

pub(crate) mod arrival;

pub use arrival::{earliest_arrival, earliest_arrival_sweep};

use crate::geometry::{
    euclid, merge_intervals, seg_point_dist, static_point_free, Disc, MovingDiscSegment, Point2,
    Vec2, Workspace,
};
use std::collections::HashMap;

/// Minimum width of a reported safe interval; collision intervals closer
/// than this are fused.
pub const MIN_INTERVAL_WIDTH: f64 = 1e-6;

/// Half-open time window `[low, high)`; `high` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeInterval {
    pub low: f64,
    pub high: f64,
}

impl SafeInterval {
    pub fn new(low: f64, high: f64) -> Self {
        debug_assert!(low < high);
        Self { low, high }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.low && t < self.high
    }

    pub fn is_unbounded(&self) -> bool {
        self.high == f64::INFINITY
    }
}

/// Half-open overlap test.
pub fn intersects(a: &SafeInterval, b: &SafeInterval) -> bool {
    a.low < b.high && b.low < a.high
}

/// The world a single robot plans against: static geometry plus moving
/// disc segments, each active on its own time domain. When built from full
/// trajectories the segments tile `[0, horizon]` per obstacle. Segments
/// carry precomputed radius-inflated bounding boxes for broad-phase
/// rejection, so the list is fixed at construction.
#[derive(Debug, Clone)]
pub struct DynamicEnvironment {
    pub workspace: Workspace,
    moving: Vec<MovingDiscSegment>,
    boxes: Vec<SegBox>,
    pub horizon: f64,
}

/// Axis-aligned bounds of a segment's swept disc.
#[derive(Debug, Clone, Copy)]
struct SegBox {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl SegBox {
    fn of(seg: &MovingDiscSegment) -> Self {
        let r = seg.radius;
        Self {
            min_x: seg.p_start.x.min(seg.p_end.x) - r,
            min_y: seg.p_start.y.min(seg.p_end.y) - r,
            max_x: seg.p_start.x.max(seg.p_end.x) + r,
            max_y: seg.p_start.y.max(seg.p_end.y) + r,
        }
    }
}

impl DynamicEnvironment {
    pub fn statics_only(workspace: Workspace) -> Self {
        Self::with_moving(workspace, Vec::new())
    }

    pub fn with_moving(workspace: Workspace, moving: Vec<MovingDiscSegment>) -> Self {
        let boxes = moving.iter().map(SegBox::of).collect();
        Self {
            workspace,
            moving,
            boxes,
            horizon: f64::INFINITY,
        }
    }

    pub fn moving(&self) -> &[MovingDiscSegment] {
        &self.moving
    }

    pub fn push_moving(&mut self, seg: MovingDiscSegment) {
        self.boxes.push(SegBox::of(&seg));
        self.moving.push(seg);
    }

    /// Obstacle segments whose swept disc can come within `pad` of the
    /// spatial segment `a`-`b`.
    pub(crate) fn segments_near(
        &self,
        a: Point2,
        b: Point2,
        pad: f64,
    ) -> impl Iterator<Item = &MovingDiscSegment> {
        let min_x = a.x.min(b.x) - pad;
        let min_y = a.y.min(b.y) - pad;
        let max_x = a.x.max(b.x) + pad;
        let max_y = a.y.max(b.y) + pad;
        self.boxes
            .iter()
            .zip(&self.moving)
            .filter(move |(bx, _)| {
                bx.min_x <= max_x && bx.max_x >= min_x && bx.min_y <= max_y && bx.max_y >= min_y
            })
            .map(|(_, seg)| seg)
    }
}

/// Complements merged collision intervals over `[0, horizon]`. Collision
/// intervals closer than [`MIN_INTERVAL_WIDTH`] are fused and safe
/// intervals narrower than it are dropped.
pub fn merge_complement(mut cis: Vec<(f64, f64)>, horizon: f64) -> Vec<SafeInterval> {
    merge_intervals(&mut cis, MIN_INTERVAL_WIDTH);
    let mut out = Vec::with_capacity(cis.len() + 1);
    let mut cursor = 0.0;
    for (a, b) in cis {
        if b <= 0.0 {
            continue;
        }
        if a > cursor + MIN_INTERVAL_WIDTH && cursor < horizon {
            out.push(SafeInterval::new(cursor, a.min(horizon)));
        }
        cursor = cursor.max(b);
        if cursor >= horizon {
            return out;
        }
    }
    if cursor < horizon {
        out.push(SafeInterval::new(cursor, horizon));
    }
    out
}

/// All safe intervals of a disc of radius `r` parked at `q`, over
/// `[0, env.horizon)`. Empty if `q` is statically blocked.
pub fn get_safe_intervals(q: Point2, r: f64, env: &DynamicEnvironment) -> Vec<SafeInterval> {
    if !static_point_free(&Disc::new(q, r), &env.workspace) {
        return Vec::new();
    }
    let mut cis: Vec<(f64, f64)> = Vec::new();
    for seg in env.segments_near(q, q, r) {
        let rho = r + seg.radius;
        // Narrow-phase prefilter: the obstacle path never comes within reach.
        if seg_point_dist(seg.p_start, seg.p_end, q) >= rho {
            continue;
        }
        let t0 = seg.t_start.max(0.0);
        let t1 = seg.t_end;
        if t0 > t1 {
            continue;
        }
        let rel0 = seg.position(t0).to(q);
        let relv = seg.velocity().scaled(-1.0);
        if let Some(iv) = stationary_collision_window(rel0, relv, rho, t0, t1) {
            cis.push(iv);
        }
    }
    merge_complement(cis, env.horizon)
}

/// Interval within `[t0, t1]` where `|rel0 + relv*(t-t0)| < rho`.
fn stationary_collision_window(
    rel0: Vec2,
    relv: Vec2,
    rho: f64,
    t0: f64,
    t1: f64,
) -> Option<(f64, f64)> {
    let a = relv.norm_sq();
    if a < 1e-18 {
        return if rel0.norm_sq() < rho * rho {
            Some((t0, t1))
        } else {
            None
        };
    }
    let b = 2.0 * rel0.dot(relv);
    let c = rel0.norm_sq() - rho * rho;
    let disc = b * b - 4.0 * a * c;
    if disc < crate::geometry::DISCRIMINANT_EPS {
        return None;
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (b + b.signum() * sq);
    let (mut lo, mut hi) = (qq / a, c / qq);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let lo = t0 + lo.max(0.0);
    let hi = if t1.is_finite() { t0 + hi.min(t1 - t0) } else { t0 + hi };
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Lazily populated map from exact configurations to their safe intervals.
/// Keys use bit-exact coordinates: configurations are planner-generated and
/// never re-derived.
#[derive(Debug, Default)]
pub struct SafeIntervalMap {
    entries: HashMap<(u64, u64), Vec<SafeInterval>>,
}

impl SafeIntervalMap {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(q: Point2) -> (u64, u64) {
        (q.x.to_bits(), q.y.to_bits())
    }

    pub fn get(&self, q: Point2) -> Option<&[SafeInterval]> {
        self.entries.get(&Self::key(q)).map(|v| v.as_slice())
    }

    /// Returns the intervals of `q`, computing and caching them on first use.
    pub fn get_or_compute(&mut self, q: Point2, r: f64, env: &DynamicEnvironment) -> &[SafeInterval] {
        self.entries
            .entry(Self::key(q))
            .or_insert_with(|| get_safe_intervals(q, r, env))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Travel time helper shared by the planner and tests.
pub fn travel_time(a: Point2, b: Point2, v_max: f64) -> f64 {
    euclid(a, b) / v_max
}
