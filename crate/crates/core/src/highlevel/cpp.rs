//! Prioritized planning: robots plan sequentially, treating the
//! trajectories of higher-priority robots as dynamic obstacles. Not
//! complete; an optional round of seeded random priority permutations
//! retries failed instances.

use super::{edge_model_for, RobotSpec, Solution};
use crate::error::Result;
use crate::geometry::{MovingDiscSegment, Workspace};
use crate::safe_interval::DynamicEnvironment;
use crate::sirrt::{plan_with_model, PlannerParams};
use crate::trajectory::Trajectory;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Plans robots in the given priority order. Returns Ok(None) as soon as
/// any robot fails to find a trajectory or the deadline expires; planner
/// errors (blocked starts/goals) propagate.
pub fn si_cpp(
    robots: &[RobotSpec],
    workspace: &Workspace,
    params: &PlannerParams,
    order: &[usize],
    kinodynamic: bool,
    deadline: Option<Instant>,
) -> Result<Option<Solution>> {
    debug_assert_eq!(order.len(), robots.len());
    let mut trajectories: Vec<Option<Trajectory>> = vec![None; robots.len()];
    let mut moving: Vec<MovingDiscSegment> = Vec::new();
    for &idx in order {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(None);
        }
        let robot = &robots[idx];
        let env = DynamicEnvironment::with_moving(workspace.clone(), moving.clone());
        let mut robot_params = *params;
        robot_params.rng_seed = params.rng_seed.wrapping_add(idx as u64);
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
            Some(traj) => {
                moving.extend(traj.to_moving_segments(f64::INFINITY));
                trajectories[idx] = Some(traj);
            }
            None => return Ok(None),
        }
    }
    let trajectories: Vec<Trajectory> = trajectories.into_iter().map(Option::unwrap).collect();
    Ok(Some(Solution::new(trajectories)))
}

/// Ascending-id priority first, then up to `restarts` seeded random
/// permutations on failure.
pub fn si_cpp_with_restarts(
    robots: &[RobotSpec],
    workspace: &Workspace,
    params: &PlannerParams,
    kinodynamic: bool,
    restarts: usize,
    deadline: Option<Instant>,
) -> Result<Option<Solution>> {
    let mut order: Vec<usize> = (0..robots.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed ^ 0x9e37_79b9_7f4a_7c15);
    for attempt in 0..=restarts {
        if attempt > 0 {
            order.shuffle(&mut rng);
        }
        if let Some(solution) = si_cpp(robots, workspace, params, &order, kinodynamic, deadline)? {
            return Ok(Some(solution));
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(None);
        }
    }
    Ok(None)
}
