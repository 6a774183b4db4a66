//! Time-parameterized robot motion: piecewise constant-velocity segments
//! with explicit waits, defined for all t >= 0 (the robot holds its last
//! waypoint forever).

use crate::error::{Error, Result};
use crate::geometry::{euclid, MovingDiscSegment, Point2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, f64)", into = "(f64, f64, f64)")]
pub struct Waypoint {
    pub q: Point2,
    pub t: f64,
}

impl Waypoint {
    pub fn new(q: Point2, t: f64) -> Self {
        Self { q, t }
    }
}

impl From<(f64, f64, f64)> for Waypoint {
    fn from(v: (f64, f64, f64)) -> Self {
        Waypoint::new(Point2::new(v.1, v.2), v.0)
    }
}

impl From<Waypoint> for (f64, f64, f64) {
    fn from(w: Waypoint) -> Self {
        (w.t, w.q.x, w.q.y)
    }
}

/// Immutable trajectory. Waypoint times are strictly increasing; a wait is
/// encoded by two consecutive waypoints sharing a configuration. Before the
/// first waypoint the robot sits at it; after the last it holds forever.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    waypoints: Vec<Waypoint>,
    pub radius: f64,
    pub v_max: f64,
}

/// Tolerance band for the per-segment speed check at construction.
const SPEED_EPS: f64 = 1e-9;

impl Trajectory {
    pub fn new(waypoints: Vec<Waypoint>, radius: f64, v_max: f64) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if waypoints[0].t < 0.0 {
            return Err(Error::InfeasiblePathTiming("negative start time".into()));
        }
        for pair in waypoints.windows(2) {
            let dt = pair[1].t - pair[0].t;
            if dt <= 0.0 {
                return Err(Error::InfeasiblePathTiming(format!(
                    "non-increasing waypoint times {} -> {}",
                    pair[0].t, pair[1].t
                )));
            }
            let d = euclid(pair[0].q, pair[1].q);
            if d / dt > v_max * (1.0 + SPEED_EPS) + SPEED_EPS {
                return Err(Error::InfeasiblePathTiming(format!(
                    "segment speed {} exceeds v_max {}",
                    d / dt,
                    v_max
                )));
            }
        }
        Ok(Self {
            waypoints,
            radius,
            v_max,
        })
    }

    pub fn stationary(q: Point2, radius: f64, v_max: f64) -> Self {
        Self {
            waypoints: vec![Waypoint::new(q, 0.0)],
            radius,
            v_max,
        }
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn start(&self) -> Point2 {
        self.waypoints[0].q
    }

    pub fn end(&self) -> Point2 {
        self.waypoints[self.waypoints.len() - 1].q
    }

    pub fn t_final(&self) -> f64 {
        self.waypoints[self.waypoints.len() - 1].t
    }

    /// Position at time `t` (clamped to the ends of the time domain).
    pub fn eval(&self, t: f64) -> Point2 {
        let wps = &self.waypoints;
        if t <= wps[0].t {
            return wps[0].q;
        }
        if t >= self.t_final() {
            return self.end();
        }
        // Index of the first waypoint with time > t.
        let idx = wps.partition_point(|w| w.t <= t);
        let (a, b) = (&wps[idx - 1], &wps[idx]);
        let s = (t - a.t) / (b.t - a.t);
        a.q.offset(a.q.to(b.q).scaled(s))
    }

    /// Total length travelled (waits contribute zero).
    pub fn path_length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|p| euclid(p[0].q, p[1].q))
            .sum()
    }

    /// Constant-velocity segments covering `[0, horizon]`, including a
    /// pre-hold before the first waypoint and a terminal goal-hold.
    pub fn to_moving_segments(&self, horizon: f64) -> Vec<MovingDiscSegment> {
        debug_assert!(horizon >= self.t_final());
        let r = self.radius;
        let mut out = Vec::with_capacity(self.waypoints.len() + 1);
        let first = &self.waypoints[0];
        if first.t > 0.0 {
            out.push(MovingDiscSegment::stationary(r, first.q, 0.0, first.t));
        }
        for pair in self.waypoints.windows(2) {
            out.push(MovingDiscSegment::new(
                r, pair[0].q, pair[1].q, pair[0].t, pair[1].t,
            ));
        }
        if horizon > self.t_final() || out.is_empty() {
            out.push(MovingDiscSegment::stationary(
                r,
                self.end(),
                self.t_final(),
                horizon,
            ));
        }
        out
    }

    /// True iff every segment speed is within `v_max` plus tolerance.
    pub fn speed_valid(&self, v_max: f64) -> bool {
        self.waypoints.windows(2).all(|p| {
            let dt = p[1].t - p[0].t;
            euclid(p[0].q, p[1].q) / dt <= v_max + 1e-6
        })
    }
}

/// Builds a trajectory from a root-to-goal chain of `(q, arrival_time)`
/// pairs. The robot waits at each vertex and departs as late as possible,
/// arriving exactly at the child's arrival time while moving at `v_max`.
pub fn from_tree_path(path: &[(Point2, f64)], radius: f64, v_max: f64) -> Result<Trajectory> {
    if path.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut wps = vec![Waypoint::new(path[0].0, path[0].1)];
    for win in path.windows(2) {
        let (pq, pt) = win[0];
        let (cq, ct) = win[1];
        let travel = euclid(pq, cq) / v_max;
        if ct < pt + travel - 1e-9 {
            return Err(Error::InfeasiblePathTiming(format!(
                "arrival {} before parent {} + travel {}",
                ct, pt, travel
            )));
        }
        let depart = (ct - travel).max(pt);
        if depart > pt + 1e-12 {
            wps.push(Waypoint::new(pq, depart));
        }
        if ct > depart {
            wps.push(Waypoint::new(cq, ct));
        }
    }
    Trajectory::new(wps, radius, v_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn eval_single_waypoint_everywhere() {
        let t = Trajectory::stationary(p(2.0, 3.0), 0.5, 0.5);
        for time in [0.0, 0.5, 100.0] {
            assert_eq!(t.eval(time), p(2.0, 3.0));
        }
        assert_eq!(t.t_final(), 0.0);
    }

    #[test]
    fn eval_midpoint_and_goal_hold() {
        let t = Trajectory::new(
            vec![Waypoint::new(p(0.0, 0.0), 0.0), Waypoint::new(p(1.0, 0.0), 2.0)],
            0.5,
            0.5,
        )
        .unwrap();
        assert_eq!(t.eval(1.0), p(0.5, 0.0));
        assert_eq!(t.eval(5.0), p(1.0, 0.0));
        assert_eq!(t.eval(0.0), p(0.0, 0.0));
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert!(matches!(
            Trajectory::new(vec![], 0.5, 0.5),
            Err(Error::EmptyTrajectory)
        ));
        let overspeed = Trajectory::new(
            vec![Waypoint::new(p(0.0, 0.0), 0.0), Waypoint::new(p(2.0, 0.0), 1.0)],
            0.5,
            0.5,
        );
        assert!(overspeed.is_err());
    }

    #[test]
    fn from_tree_path_exact_travel() {
        let t = from_tree_path(&[(p(0.0, 0.0), 0.0), (p(1.0, 0.0), 2.0)], 0.5, 0.5).unwrap();
        assert_eq!(t.waypoints().len(), 2);
        assert_eq!(t.eval(0.0), p(0.0, 0.0));
        assert_eq!(t.eval(2.0), p(1.0, 0.0));
    }

    #[test]
    fn from_tree_path_inserts_wait() {
        // Distance 1, v_max 0.5 -> travel 2; arrival 5 -> wait until 3.
        let t = from_tree_path(&[(p(0.0, 0.0), 0.0), (p(1.0, 0.0), 5.0)], 0.5, 0.5).unwrap();
        assert_eq!(t.waypoints().len(), 3);
        assert_eq!(t.eval(3.0), p(0.0, 0.0));
        assert_eq!(t.eval(4.0), p(0.5, 0.0));
        assert_eq!(t.eval(5.0), p(1.0, 0.0));
    }

    #[test]
    fn from_tree_path_rejects_inconsistent_times() {
        let r = from_tree_path(&[(p(0.0, 0.0), 0.0), (p(4.0, 0.0), 1.0)], 0.5, 0.5);
        assert!(r.is_err());
    }

    #[test]
    fn from_tree_path_single_vertex() {
        let t = from_tree_path(&[(p(3.0, 3.0), 0.0)], 0.5, 0.5).unwrap();
        assert_eq!(t.t_final(), 0.0);
        assert_eq!(t.eval(10.0), p(3.0, 3.0));
    }

    #[test]
    fn segments_cover_horizon_and_match_eval() {
        let t = from_tree_path(
            &[(p(0.0, 0.0), 1.0), (p(1.0, 0.0), 5.0), (p(1.0, 2.0), 9.0)],
            0.5,
            0.5,
        )
        .unwrap();
        let segs = t.to_moving_segments(20.0);
        // Coverage of [0, 20] without gaps.
        assert_eq!(segs[0].t_start, 0.0);
        assert_eq!(segs.last().unwrap().t_end, 20.0);
        for w in segs.windows(2) {
            assert!((w[0].t_end - w[1].t_start).abs() < 1e-12);
        }
        // Positions agree with eval at random times.
        for i in 0..100 {
            let time = i as f64 * 0.199;
            let seg = segs
                .iter()
                .find(|s| time >= s.t_start && time <= s.t_end)
                .unwrap();
            let d = euclid(seg.position(time), t.eval(time));
            assert!(d < 1e-9, "t={time} d={d}");
        }
    }

    #[test]
    fn stationary_trajectory_single_hold_segment() {
        let t = Trajectory::stationary(p(1.0, 1.0), 0.5, 0.5);
        let segs = t.to_moving_segments(f64::INFINITY);
        assert_eq!(segs.len(), 1);
        assert!(segs[0].is_stationary());
        assert_eq!(segs[0].t_end, f64::INFINITY);
    }

    #[test]
    fn speed_validation() {
        let t = Trajectory::new(
            vec![Waypoint::new(p(0.0, 0.0), 0.0), Waypoint::new(p(1.0, 0.0), 2.0)],
            0.5,
            0.5,
        )
        .unwrap();
        assert!(t.speed_valid(0.5)); // exactly v_max
        assert!(!t.speed_valid(0.4));
        assert!(Trajectory::stationary(p(0.0, 0.0), 0.5, 0.5).speed_valid(0.0));
    }

    #[test]
    fn eval_is_lipschitz_continuous() {
        let t = from_tree_path(
            &[(p(0.0, 0.0), 0.0), (p(2.0, 0.0), 6.0), (p(2.0, 1.5), 9.0)],
            0.5,
            0.5,
        )
        .unwrap();
        let eps = 1e-3;
        let mut time = 0.0;
        while time < 10.0 {
            let d = euclid(t.eval(time + eps), t.eval(time));
            assert!(d <= 0.5 * eps + 1e-9);
            time += 0.037;
        }
    }

    #[test]
    fn round_trip_vertex_arrival_times() {
        let path = [
            (p(0.0, 0.0), 0.0),
            (p(3.0, 0.0), 7.0),
            (p(3.0, 4.0), 20.0),
            (p(0.0, 4.0), 26.0),
        ];
        let t = from_tree_path(&path, 0.5, 0.5).unwrap();
        for (q, at) in path {
            assert!(euclid(t.eval(at), q) < 1e-9);
        }
        assert_eq!(t.t_final(), 26.0);
    }
}
