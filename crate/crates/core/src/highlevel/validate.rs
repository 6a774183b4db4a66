//! Independent dense-time solution validator. Deliberately avoids the
//! interval machinery: it samples positions on a fixed grid and checks
//! clearances, speed bounds, and start/goal attainment directly.

use super::{RobotSpec, Solution};
use crate::geometry::{euclid, Point2, Workspace};
use std::fmt;

/// Sampling step of the dense check.
pub const VALIDATE_DT: f64 = 1e-2;
/// Allowed penetration before a clearance violation is reported.
pub const CLEARANCE_TOL: f64 = 1e-6;
/// Allowed excess over the speed bound.
pub const SPEED_TOL: f64 = 1e-6;
/// Allowed start/goal placement error.
pub const ENDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PairClearance {
        i: usize,
        j: usize,
        t: f64,
        dist: f64,
        min_dist: f64,
    },
    StaticClearance {
        robot: usize,
        t: f64,
        depth: f64,
    },
    Speed {
        robot: usize,
        speed: f64,
        v_max: f64,
    },
    StartMismatch {
        robot: usize,
        dist: f64,
    },
    GoalMismatch {
        robot: usize,
        dist: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PairClearance { i, j, t, dist, min_dist } => write!(
                f,
                "robots {i} and {j} at t={t:.3}: distance {dist:.6} < {min_dist:.6}"
            ),
            Violation::StaticClearance { robot, t, depth } => {
                write!(f, "robot {robot} at t={t:.3}: static penetration {depth:.6}")
            }
            Violation::Speed { robot, speed, v_max } => {
                write!(f, "robot {robot}: segment speed {speed:.6} > v_max {v_max}")
            }
            Violation::StartMismatch { robot, dist } => {
                write!(f, "robot {robot}: start offset {dist:.9}")
            }
            Violation::GoalMismatch { robot, dist } => {
                write!(f, "robot {robot}: goal offset {dist:.9}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in self.violations.iter().take(20) {
            writeln!(f, "  {v}")?;
        }
        if self.violations.len() > 20 {
            writeln!(f, "  ... {} more", self.violations.len() - 20)?;
        }
        Ok(())
    }
}

/// Dense-time check of pairwise clearance, static clearance, speed bounds,
/// and start/goal attainment with goal-hold up to the makespan.
pub fn validate(solution: &Solution, robots: &[RobotSpec], workspace: &Workspace) -> ValidationReport {
    let mut report = ValidationReport::default();
    let trajs = &solution.trajectories;
    if trajs.len() != robots.len() {
        report.violations.push(Violation::StartMismatch {
            robot: usize::MAX,
            dist: f64::NAN,
        });
        return report;
    }

    for (k, (traj, robot)) in trajs.iter().zip(robots).enumerate() {
        let sd = euclid(traj.eval(0.0), robot.start);
        if sd > ENDPOINT_TOL {
            report.violations.push(Violation::StartMismatch { robot: k, dist: sd });
        }
        let gd = euclid(traj.eval(solution.makespan.max(traj.t_final())), robot.goal);
        if gd > ENDPOINT_TOL {
            report.violations.push(Violation::GoalMismatch { robot: k, dist: gd });
        }
        for pair in traj.waypoints().windows(2) {
            let speed = euclid(pair[0].q, pair[1].q) / (pair[1].t - pair[0].t);
            if speed > robot.v_max + SPEED_TOL {
                report.violations.push(Violation::Speed {
                    robot: k,
                    speed,
                    v_max: robot.v_max,
                });
                break;
            }
        }
    }

    let makespan = solution.makespan;
    let steps = (makespan / VALIDATE_DT).ceil() as usize;
    let mut positions: Vec<Point2> = vec![Point2::new(0.0, 0.0); trajs.len()];
    for step in 0..=steps {
        let t = (step as f64 * VALIDATE_DT).min(makespan);
        for (k, traj) in trajs.iter().enumerate() {
            positions[k] = traj.eval(t);
        }
        for (k, robot) in robots.iter().enumerate() {
            let depth = static_penetration(positions[k], robot.radius, workspace);
            if depth > CLEARANCE_TOL {
                report.violations.push(Violation::StaticClearance { robot: k, t, depth });
            }
        }
        for i in 0..robots.len() {
            for j in (i + 1)..robots.len() {
                let min_dist = robots[i].radius + robots[j].radius;
                let dist = euclid(positions[i], positions[j]);
                if dist < min_dist - CLEARANCE_TOL {
                    report.violations.push(Violation::PairClearance {
                        i,
                        j,
                        t,
                        dist,
                        min_dist,
                    });
                }
            }
        }
    }
    report
}

/// How deep the disc pokes into statics or out of bounds; 0 when free.
fn static_penetration(p: Point2, r: f64, ws: &Workspace) -> f64 {
    let mut depth: f64 = 0.0;
    depth = depth.max(r - p.x).max(p.x - (ws.width - r));
    depth = depth.max(r - p.y).max(p.y - (ws.height - r));
    for obs in &ws.static_obstacles {
        depth = depth.max(r - obs.distance_to_point(p));
    }
    depth.max(0.0)
}
