//! Greedy conflict-based search: best-first over a constraint tree whose
//! node cost is the number of pairwise conflicts. Expansion resolves the
//! earliest conflict by constraining either robot and replanning only it
//! against its accumulated constraint obstacles.

use super::{
    constraints_to_obstacles, detect_conflicts_by_ref, edge_model_for, Conflict, Constraint,
    RobotSpec, Solution,
};
use crate::error::{Error, Result};
use crate::geometry::Workspace;
use crate::safe_interval::DynamicEnvironment;
use crate::sirrt::{plan_with_model, PlannerParams};
use crate::trajectory::Trajectory;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

struct CtNode {
    constraints: Vec<Vec<Constraint>>,
    trajectories: Vec<Arc<Trajectory>>,
    conflicts: Vec<Conflict>,
}

impl CtNode {
    fn cost(&self) -> usize {
        self.conflicts.len()
    }
}

/// Best-first search over the constraint tree; FIFO tie-break on equal
/// conflict counts. Returns the first zero-conflict node's trajectories,
/// or None once `node_limit` nodes were created, the frontier empties, or
/// the deadline passes.
pub fn si_ccbs(
    robots: &[RobotSpec],
    workspace: &Workspace,
    params: &PlannerParams,
    node_limit: usize,
    kinodynamic: bool,
    deadline: Option<Instant>,
) -> Result<Option<Solution>> {
    debug_assert!(node_limit > 0);
    let mut root_trajs = Vec::with_capacity(robots.len());
    for robot in robots {
        let env = DynamicEnvironment::statics_only(workspace.clone());
        let mut robot_params = *params;
        robot_params.rng_seed = params.rng_seed.wrapping_add(robot.id as u64);
        robot_params.v_max = robot.v_max;
        let edge = edge_model_for(kinodynamic, robot.v_max);
        match plan_with_model(
            robot.start,
            robot.goal,
            robot.radius,
            &env,
            robot_params,
            edge,
            deadline,
        )? {
            Some(t) => root_trajs.push(Arc::new(t)),
            None => return Ok(None),
        }
    }
    let root_conflicts = conflicts_of(&root_trajs);
    let mut nodes = vec![CtNode {
        constraints: vec![Vec::new(); robots.len()],
        trajectories: root_trajs,
        conflicts: root_conflicts,
    }];
    let mut created: usize = 1;
    let mut open: BinaryHeap<Reverse<(usize, u64, usize)>> = BinaryHeap::new();
    open.push(Reverse((nodes[0].cost(), 0, 0)));
    let mut insertion: u64 = 1;

    while let Some(Reverse((_, _, idx))) = open.pop() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(None);
        }
        if nodes[idx].conflicts.is_empty() {
            let trajs = nodes[idx]
                .trajectories
                .iter()
                .map(|t| (**t).clone())
                .collect();
            return Ok(Some(Solution::new(trajs)));
        }
        if created >= node_limit {
            return Ok(None);
        }
        let conflict = nodes[idx].conflicts[0].clone();
        for (constrained, other) in [(conflict.i, conflict.j), (conflict.j, conflict.i)] {
            let mut constraints = nodes[idx].constraints.clone();
            constraints[constrained].push(Constraint {
                robot: constrained,
                source_robot: other,
                snapshot: nodes[idx].trajectories[other].clone(),
                window: (conflict.t_s, conflict.t_e),
            });
            let obstacles = constraints_to_obstacles(&constraints[constrained]);
            let env = DynamicEnvironment::with_moving(workspace.clone(), obstacles);
            let robot = &robots[constrained];
            let mut robot_params = *params;
            robot_params.rng_seed = child_seed(params.rng_seed, constrained, created);
            robot_params.v_max = robot.v_max;
            let edge = edge_model_for(kinodynamic, robot.v_max);
            let planned = match plan_with_model(
                robot.start,
                robot.goal,
                robot.radius,
                &env,
                robot_params,
                edge,
                deadline,
            ) {
                Ok(t) => t,
                // A constraint window can make a start or goal temporarily
                // unusable; that child is simply infeasible.
                Err(Error::StartInfeasible) | Err(Error::GoalNeverFree) => None,
                Err(e) => return Err(e),
            };
            let Some(new_traj) = planned else { continue };
            let mut trajectories = nodes[idx].trajectories.clone();
            trajectories[constrained] = Arc::new(new_traj);
            let conflicts = conflicts_of(&trajectories);
            nodes.push(CtNode {
                constraints,
                trajectories,
                conflicts,
            });
            created += 1;
            let new_idx = nodes.len() - 1;
            open.push(Reverse((nodes[new_idx].cost(), insertion, new_idx)));
            insertion += 1;
        }
    }
    Ok(None)
}

fn child_seed(base: u64, robot: usize, created: usize) -> u64 {
    base ^ (robot as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (created as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

fn conflicts_of(trajectories: &[Arc<Trajectory>]) -> Vec<Conflict> {
    detect_conflicts_by_ref(&trajectories.iter().map(Arc::as_ref).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::highlevel::{detect_conflicts, si_cpp, validate};

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn robot(id: usize, start: Point2, goal: Point2) -> RobotSpec {
        RobotSpec {
            id,
            start,
            goal,
            radius: 0.5,
            v_max: 0.5,
        }
    }

    fn params(seed: u64) -> PlannerParams {
        PlannerParams {
            iteration: 400,
            rng_seed: seed,
            ..PlannerParams::default()
        }
    }

    #[test]
    fn conflict_free_root_returned_directly() {
        let ws = Workspace::new(40.0, 40.0);
        let robots = vec![
            robot(0, p(5.0, 10.0), p(35.0, 10.0)),
            robot(1, p(5.0, 30.0), p(35.0, 30.0)),
        ];
        let solution = si_ccbs(&robots, &ws, &params(2), 100, false, None)
            .unwrap()
            .unwrap();
        assert!(detect_conflicts(&solution.trajectories).is_empty());
    }

    #[test]
    fn node_limit_one_with_conflicting_root_fails() {
        let ws = Workspace::new(40.0, 40.0);
        let robots = vec![
            robot(0, p(14.0, 20.0), p(26.0, 20.0)),
            robot(1, p(26.0, 20.0), p(14.0, 20.0)),
        ];
        let got = si_ccbs(&robots, &ws, &params(2), 1, false, None).unwrap();
        assert!(got.is_none());
    }

    #[test]
    fn swap_instance_zero_conflicts_and_valid() {
        let ws = Workspace::new(40.0, 40.0);
        let robots = vec![
            robot(0, p(14.0, 20.0), p(26.0, 20.0)),
            robot(1, p(26.0, 20.0), p(14.0, 20.0)),
        ];
        let solution = si_ccbs(&robots, &ws, &params(4), 500, false, None)
            .unwrap()
            .expect("ccbs solves the swap");
        assert!(detect_conflicts(&solution.trajectories).is_empty());
        let report = validate(&solution, &robots, &ws);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn ccbs_not_worse_than_cpp_on_swap() {
        let ws = Workspace::new(40.0, 40.0);
        let robots = vec![
            robot(0, p(14.0, 20.0), p(26.0, 20.0)),
            robot(1, p(26.0, 20.0), p(14.0, 20.0)),
        ];
        let mut wins = 0;
        let mut ties = 0;
        let mut losses = 0;
        for seed in 0..10 {
            let pr = params(seed);
            let ccbs = si_ccbs(&robots, &ws, &pr, 500, false, None).unwrap();
            let cpp = si_cpp(&robots, &ws, &pr, &[0, 1], false, None).unwrap();
            if let (Some(a), Some(b)) = (ccbs, cpp) {
                if a.flowtime < b.flowtime - 1e-9 {
                    wins += 1;
                } else if a.flowtime > b.flowtime + 1e-9 {
                    losses += 1;
                } else {
                    ties += 1;
                }
            }
        }
        assert!(
            wins + ties >= losses,
            "ccbs should not lose the majority: {wins} wins {ties} ties {losses} losses"
        );
    }

    #[test]
    fn constraint_sets_grow_down_the_tree() {
        // Indirect check through soundness: after resolving, the replanned
        // robot no longer collides with the constraint obstacle window.
        let ws = Workspace::new(40.0, 40.0);
        let robots = vec![
            robot(0, p(14.0, 20.0), p(26.0, 20.0)),
            robot(1, p(26.0, 20.0), p(14.0, 20.0)),
        ];
        let solution = si_ccbs(&robots, &ws, &params(7), 500, false, None)
            .unwrap()
            .unwrap();
        assert!(detect_conflicts(&solution.trajectories).is_empty());
    }

    #[test]
    fn replanning_under_constraint_is_sound() {
        // Build the swap conflict by hand, constrain robot 0 with robot 1's
        // snapshot, replan robot 0, and verify it never collides with the
        // constraint obstacle inside the window.
        use crate::geometry::disc_disc_collision_times;
        use crate::safe_interval::DynamicEnvironment;
        use crate::sirrt::{plan_with_model, EdgeModel};

        let ws = Workspace::new(40.0, 40.0);
        let robots = vec![
            robot(0, p(14.0, 20.0), p(26.0, 20.0)),
            robot(1, p(26.0, 20.0), p(14.0, 20.0)),
        ];
        let pr = params(9);
        let plan_solo = |r: &RobotSpec| {
            let env = DynamicEnvironment::statics_only(ws.clone());
            plan_with_model(
                r.start,
                r.goal,
                r.radius,
                &env,
                pr,
                EdgeModel::constant(r.v_max),
                None,
            )
            .unwrap()
            .unwrap()
        };
        let t0 = plan_solo(&robots[0]);
        let t1 = plan_solo(&robots[1]);
        let conflicts = detect_conflicts(&[t0, t1.clone()]);
        assert!(!conflicts.is_empty(), "swap roots must conflict");
        let c = &conflicts[0];
        let constraint = Constraint {
            robot: 0,
            source_robot: 1,
            snapshot: Arc::new(t1),
            window: (c.t_s, c.t_e),
        };
        let obstacles = constraints_to_obstacles(std::slice::from_ref(&constraint));
        let env = DynamicEnvironment::with_moving(ws.clone(), obstacles.clone());
        let replanned = plan_with_model(
            robots[0].start,
            robots[0].goal,
            robots[0].radius,
            &env,
            pr,
            EdgeModel::constant(0.5),
            None,
        )
        .unwrap()
        .expect("replan under one window constraint");
        let horizon = replanned
            .t_final()
            .max(obstacles.iter().map(|o| o.t_end).fold(0.0, f64::max));
        for seg in replanned.to_moving_segments(horizon) {
            for obs in &obstacles {
                assert_eq!(
                    disc_disc_collision_times(&seg, obs),
                    None,
                    "replanned robot still hits the constraint window"
                );
            }
        }
    }
}
