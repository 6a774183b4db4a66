//! Multi-robot conflict resolution on top of the single-robot planner:
//! prioritized planning and greedy conflict-based search, plus
//! continuous-time conflict detection and an independent solution
//! validator.

mod ccbs;
mod cpp;
mod validate;

pub use ccbs::si_ccbs;
pub use cpp::{si_cpp, si_cpp_with_restarts};
pub use validate::{validate, ValidationReport, Violation};

use crate::geometry::{disc_disc_collision_times, merge_intervals, MovingDiscSegment, Point2};
use crate::sirrt::EdgeModel;
use crate::trajectory::Trajectory;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct RobotSpec {
    pub id: usize,
    pub start: Point2,
    pub goal: Point2,
    pub radius: f64,
    pub v_max: f64,
}

/// Maximal time window during which two robots' discs overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct Conflict {
    pub i: usize,
    pub j: usize,
    pub t_s: f64,
    pub t_e: f64,
}

/// Obligation on `robot` to avoid another robot's swept disc during the
/// window. The blocking trajectory is snapshotted at constraint creation
/// and stays active even if that robot is later replanned elsewhere in
/// the constraint tree.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub robot: usize,
    pub source_robot: usize,
    pub snapshot: Arc<Trajectory>,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trajectories: Vec<Trajectory>,
    pub flowtime: f64,
    pub makespan: f64,
}

impl Solution {
    pub fn new(trajectories: Vec<Trajectory>) -> Self {
        let (flowtime, makespan) = metrics(&trajectories);
        Self {
            trajectories,
            flowtime,
            makespan,
        }
    }
}

/// Flowtime (sum of final arrival times) and makespan (their maximum).
pub fn metrics(trajectories: &[Trajectory]) -> (f64, f64) {
    let flowtime = trajectories.iter().map(|t| t.t_final()).sum();
    let makespan = trajectories
        .iter()
        .map(|t| t.t_final())
        .fold(0.0, f64::max);
    (flowtime, makespan)
}

/// Conflict windows closer than this are stitched into one conflict.
const CONFLICT_STITCH_GAP: f64 = 1e-6;

/// All pairwise conflicts over `[0, max t_final]`, ascending by start time.
pub fn detect_conflicts(trajectories: &[Trajectory]) -> Vec<Conflict> {
    detect_conflicts_by_ref(&trajectories.iter().collect::<Vec<_>>())
}

pub(crate) fn detect_conflicts_by_ref(trajectories: &[&Trajectory]) -> Vec<Conflict> {
    let horizon = trajectories
        .iter()
        .map(|t| t.t_final())
        .fold(0.0, f64::max);
    let segs: Vec<Vec<MovingDiscSegment>> = trajectories
        .iter()
        .map(|t| t.to_moving_segments(horizon))
        .collect();
    let mut out = Vec::new();
    for i in 0..trajectories.len() {
        for j in (i + 1)..trajectories.len() {
            let mut windows = pairwise_collision_windows(&segs[i], &segs[j]);
            merge_intervals(&mut windows, CONFLICT_STITCH_GAP);
            for (t_s, t_e) in windows {
                out.push(Conflict { i, j, t_s, t_e });
            }
        }
    }
    out.sort_by(|a, b| {
        a.t_s
            .total_cmp(&b.t_s)
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    out
}

/// Merge-scan over two time-sorted segment lists; only segments with
/// overlapping time domains are tested.
fn pairwise_collision_windows(
    a: &[MovingDiscSegment],
    b: &[MovingDiscSegment],
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut ai, mut bi) = (0usize, 0usize);
    while ai < a.len() && bi < b.len() {
        let sa = &a[ai];
        let sb = &b[bi];
        if sa.t_end < sb.t_start {
            ai += 1;
            continue;
        }
        if sb.t_end < sa.t_start {
            bi += 1;
            continue;
        }
        if let Some(iv) = disc_disc_collision_times(sa, sb) {
            out.push(iv);
        }
        if sa.t_end <= sb.t_end {
            ai += 1;
        } else {
            bi += 1;
        }
    }
    out
}

/// Each constraint contributes the blocking robot's disc along its
/// snapshotted trajectory, restricted to the constraint window.
pub fn constraints_to_obstacles(constraints: &[Constraint]) -> Vec<MovingDiscSegment> {
    let mut out = Vec::new();
    for c in constraints {
        let (w0, w1) = c.window;
        if w1 <= w0 {
            continue;
        }
        let horizon = w1.max(c.snapshot.t_final());
        for seg in c.snapshot.to_moving_segments(horizon) {
            let t0 = seg.t_start.max(w0);
            let t1 = seg.t_end.min(w1);
            if t0 >= t1 {
                continue;
            }
            out.push(MovingDiscSegment::new(
                seg.radius,
                seg.position(t0),
                seg.position(t1),
                t0,
                t1,
            ));
        }
    }
    out
}

pub(crate) fn edge_model_for(kinodynamic: bool, v_max: f64) -> EdgeModel {
    if kinodynamic {
        EdgeModel::bang_bang(v_max)
    } else {
        EdgeModel::constant(v_max)
    }
}
