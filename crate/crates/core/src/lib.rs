//! Continuous-space, continuous-time multi-robot trajectory planning.
//!
//! The low level is a safe-interval RRT* planner for a single disc robot
//! among moving obstacles. Two high-level layers resolve inter-robot
//! conflicts: prioritized planning and a greedy conflict-based search.
//! A benchmark harness generates randomized scenarios, runs the planners
//! under wall-clock limits and exports results as JSON/CSV/SVG.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod highlevel;
pub mod kinodynamic;
pub mod safe_interval;
pub mod sirrt;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::{euclid, Disc, MovingDiscSegment, Point2, StaticObstacle, Vec2, Workspace};
pub use highlevel::{Conflict, Constraint, RobotSpec, Solution, ValidationReport};
pub use kinodynamic::BangBangParams;
pub use safe_interval::{DynamicEnvironment, SafeInterval, SafeIntervalMap};
pub use sirrt::{EdgeModel, PlannerParams, SiRrt};
pub use trajectory::{Trajectory, Waypoint};
