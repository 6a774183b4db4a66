//! File interfaces: scenario and solution JSON documents, results CSV,
//! and SVG snapshots of an instance with planned trajectories.

use super::runner::RunResult;
use super::scenario::ScenarioInstance;
use crate::error::{Error, Result};
use crate::geometry::{Point2, StaticObstacle, Workspace};
use crate::highlevel::{RobotSpec, Solution};
use crate::trajectory::{Trajectory, Waypoint};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    env_name: String,
    width: f64,
    height: f64,
    obstacles: Vec<StaticObstacle>,
    robots: Vec<RobotFile>,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RobotFile {
    id: usize,
    start: Point2,
    goal: Point2,
    radius: f64,
    v_max: f64,
}

pub fn scenario_to_json(instance: &ScenarioInstance) -> Result<String> {
    let file = ScenarioFile {
        env_name: instance.env_name.clone(),
        width: instance.workspace.width,
        height: instance.workspace.height,
        obstacles: instance.workspace.static_obstacles.clone(),
        robots: instance
            .robots
            .iter()
            .map(|r| RobotFile {
                id: r.id,
                start: r.start,
                goal: r.goal,
                radius: r.radius,
                v_max: r.v_max,
            })
            .collect(),
        seed: instance.seed,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn scenario_from_json(text: &str) -> Result<ScenarioInstance> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    if file.width <= 0.0 || file.height <= 0.0 {
        return Err(Error::InvalidInput("workspace must have positive size".into()));
    }
    for (pos, r) in file.robots.iter().enumerate() {
        if r.id != pos {
            return Err(Error::InvalidInput(
                "robot ids must be sequential from 0".into(),
            ));
        }
        if r.radius <= 0.0 || r.v_max <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "robot {} must have positive radius and v_max",
                r.id
            )));
        }
    }
    Ok(ScenarioInstance {
        env_name: file.env_name,
        workspace: Workspace::with_obstacles(file.width, file.height, file.obstacles),
        robots: file
            .robots
            .into_iter()
            .map(|r| RobotSpec {
                id: r.id,
                start: r.start,
                goal: r.goal,
                radius: r.radius,
                v_max: r.v_max,
            })
            .collect(),
        seed: file.seed,
    })
}

pub fn write_scenario(instance: &ScenarioInstance, path: &Path) -> Result<()> {
    std::fs::write(path, scenario_to_json(instance)?)?;
    Ok(())
}

pub fn read_scenario(path: &Path) -> Result<ScenarioInstance> {
    scenario_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct SolutionFile {
    robots: Vec<SolutionRobotFile>,
    flowtime: f64,
    makespan: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SolutionRobotFile {
    id: usize,
    waypoints: Vec<Waypoint>,
    t_final: f64,
}

pub fn solution_to_json(solution: &Solution) -> Result<String> {
    let file = SolutionFile {
        robots: solution
            .trajectories
            .iter()
            .enumerate()
            .map(|(id, t)| SolutionRobotFile {
                id,
                waypoints: t.waypoints().to_vec(),
                t_final: t.t_final(),
            })
            .collect(),
        flowtime: solution.flowtime,
        makespan: solution.makespan,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Rebuilds a solution against the scenario's robots (radii and speed
/// bounds come from the scenario, not the solution document).
pub fn solution_from_json(text: &str, robots: &[RobotSpec]) -> Result<Solution> {
    let file: SolutionFile = serde_json::from_str(text)?;
    if file.robots.len() != robots.len() {
        return Err(Error::InvalidInput(format!(
            "solution has {} robots, scenario has {}",
            file.robots.len(),
            robots.len()
        )));
    }
    let mut trajectories = Vec::with_capacity(robots.len());
    for (entry, spec) in file.robots.iter().zip(robots) {
        if entry.id != spec.id {
            return Err(Error::InvalidInput(format!(
                "solution robot id {} does not match scenario id {}",
                entry.id, spec.id
            )));
        }
        trajectories.push(Trajectory::new(
            entry.waypoints.clone(),
            spec.radius,
            spec.v_max,
        )?);
    }
    Ok(Solution::new(trajectories))
}

pub fn write_solution(solution: &Solution, path: &Path) -> Result<()> {
    std::fs::write(path, solution_to_json(solution)?)?;
    Ok(())
}

pub fn read_solution(path: &Path, robots: &[RobotSpec]) -> Result<Solution> {
    solution_from_json(&std::fs::read_to_string(path)?, robots)
}

pub fn csv_string(results: &[RunResult]) -> String {
    let mut out = String::from(
        "instance_id,env,n_robots,planner,seed,success,flowtime_s,makespan_s,sum_distance_m,wall_time_s\n",
    );
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.6}",
            r.instance_id,
            r.env,
            r.n_robots,
            r.planner,
            r.seed,
            r.success,
            opt(r.flowtime),
            opt(r.makespan),
            opt(r.sum_distance),
            r.wall_time,
        );
    }
    out
}

pub fn export_csv(results: &[RunResult], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(results))?;
    Ok(())
}

const SVG_SCALE: f64 = 20.0;
const PALETTE: [&str; 10] = [
    "#e6194b", "#3cb44b", "#0082c8", "#f58231", "#911eb4", "#46f0f0", "#d4a017", "#f032e6",
    "#008080", "#aa6e28",
];

/// SVG snapshot: obstacles, start/goal markers, trajectory polylines.
pub fn svg_string(instance: &ScenarioInstance, solution: Option<&Solution>) -> String {
    let ws = &instance.workspace;
    let w = ws.width * SVG_SCALE;
    let h = ws.height * SVG_SCALE;
    let x = |v: f64| v * SVG_SCALE;
    let y = |v: f64| (ws.height - v) * SVG_SCALE;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white" stroke="black" stroke-width="2"/>"#
    );
    for obs in &ws.static_obstacles {
        match *obs {
            StaticObstacle::Circle { center, radius } => {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#9e9e9e"/>"##,
                    x(center.x),
                    y(center.y),
                    radius * SVG_SCALE
                );
            }
            StaticObstacle::Rect { min, max } => {
                let _ = writeln!(
                    s,
                    r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9e9e9e"/>"##,
                    x(min.x),
                    y(max.y),
                    (max.x - min.x) * SVG_SCALE,
                    (max.y - min.y) * SVG_SCALE
                );
            }
        }
    }
    for (k, robot) in instance.robots.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some(sol) = solution {
            if let Some(traj) = sol.trajectories.get(k) {
                let mut points = String::new();
                for wp in traj.waypoints() {
                    let _ = write!(points, "{:.2},{:.2} ", x(wp.q.x), y(wp.q.y));
                }
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" opacity="0.8"/>"#,
                    points.trim_end()
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{color}" opacity="0.9"/>"#,
            x(robot.start.x),
            y(robot.start.y),
            robot.radius * SVG_SCALE
        );
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            x(robot.goal.x),
            y(robot.goal.y),
            robot.radius * SVG_SCALE
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn export_svg(
    instance: &ScenarioInstance,
    solution: Option<&Solution>,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, svg_string(instance, solution))?;
    Ok(())
}
