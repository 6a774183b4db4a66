//! Shared fixtures for the criterion benchmarks.

use siplan_core::geometry::{Point2, Workspace};
use siplan_core::harness::{random_dynamic_obstacles, scenario::WORKSPACE_SIZE};
use siplan_core::safe_interval::DynamicEnvironment;

/// An empty 40 m x 40 m workspace with `n` seeded moving obstacles that
/// keep the standard start (5,5) and goal (35,35) usable.
pub fn crowded_env(n: usize, seed: u64) -> DynamicEnvironment {
    let ws = Workspace::new(WORKSPACE_SIZE, WORKSPACE_SIZE);
    let keep_out = [(Point2::new(5.0, 5.0), 0.5), (Point2::new(35.0, 35.0), 0.5)];
    let moving = random_dynamic_obstacles(&ws, n, 0.5, 0.5, seed, &keep_out);
    DynamicEnvironment::with_moving(ws, moving)
}
