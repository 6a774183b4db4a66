//! Experiment orchestration: runs a planner over a batch of generated
//! instances under per-instance wall-clock limits, validates every claimed
//! solution, and aggregates metrics over the successful runs.

use super::scenario::{generate_instance, EnvKind};
use crate::error::{Error, Result};
use crate::highlevel::{
    edge_model_for, si_ccbs, si_cpp_with_restarts, validate, Solution, ValidationReport,
};
use crate::safe_interval::DynamicEnvironment;
use crate::sirrt::{plan_with_model, PlannerParams};
use crate::trajectory::Trajectory;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    /// Independent single-robot planning, no conflict resolution.
    SiRrt,
    /// Prioritized planning.
    SiCpp,
    /// Greedy conflict-based search.
    SiCcbs,
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PlannerKind::SiRrt => "si-rrt",
            PlannerKind::SiCpp => "si-cpp",
            PlannerKind::SiCcbs => "si-ccbs",
        };
        write!(f, "{s}")
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "si-rrt" => Ok(PlannerKind::SiRrt),
            "si-cpp" => Ok(PlannerKind::SiCpp),
            "si-ccbs" => Ok(PlannerKind::SiCcbs),
            other => Err(Error::InvalidInput(format!("unknown planner {other:?}"))),
        }
    }
}

/// Random-permutation retries used by the prioritized planner on failure.
pub const CPP_RESTARTS: usize = 2;
/// Constraint-tree size cap for the conflict-based search.
pub const CCBS_NODE_LIMIT: usize = 10_000;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub env: EnvKind,
    pub n_robots: usize,
    pub n_instances: usize,
    /// Per-instance wall-clock limit, seconds.
    pub time_limit: f64,
    pub planner: PlannerKind,
    pub params: PlannerParams,
    pub kinodynamic: bool,
    pub heterogeneous_radii: bool,
}

impl BenchConfig {
    /// The full experimental protocol: 50 unique instances per environment
    /// and a five-minute per-instance limit with the standard parameters
    /// (lambda 0.1, d_max 5 m, 1500 iterations, v_max 0.5 m/s).
    pub fn paper_protocol(env: EnvKind, n_robots: usize, planner: PlannerKind) -> Self {
        Self {
            env,
            n_robots,
            n_instances: 50,
            time_limit: 300.0,
            planner,
            params: PlannerParams::default(),
            kinodynamic: false,
            heterogeneous_radii: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub instance_id: usize,
    pub env: String,
    pub n_robots: usize,
    pub planner: String,
    pub seed: u64,
    pub success: bool,
    pub flowtime: Option<f64>,
    pub makespan: Option<f64>,
    pub sum_distance: Option<f64>,
    pub wall_time: f64,
    pub validation: ValidationReport,
}

/// Total path length over all robots; waits contribute nothing.
pub fn sum_of_distance(trajectories: &[Trajectory]) -> f64 {
    trajectories.iter().map(|t| t.path_length()).sum()
}

/// Runs the configured planner on instances seeded `0..n_instances`.
/// Instances execute in parallel; results are ordered by instance id and
/// every claimed solution is validated.
pub fn run(config: &BenchConfig) -> Result<Vec<RunResult>> {
    let mut results = (0..config.n_instances)
        .into_par_iter()
        .map(|i| run_instance(config, i))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by_key(|r| r.instance_id);
    Ok(results)
}

fn run_instance(config: &BenchConfig, instance_id: usize) -> Result<RunResult> {
    let seed = instance_id as u64;
    let instance = generate_instance(
        config.env,
        config.n_robots,
        config.heterogeneous_radii,
        config.params.v_max,
        seed,
    )?;
    let mut params = config.params;
    params.rng_seed = config
        .params
        .rng_seed
        .wrapping_add(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let deadline = Instant::now() + Duration::from_secs_f64(config.time_limit);
    let started = Instant::now();
    let solution = solve(config, &instance, &params, deadline);
    let wall_time = started.elapsed().as_secs_f64();

    let result = match solution {
        Some(s) => {
            let validation = validate(&s, &instance.robots, &instance.workspace);
            RunResult {
                instance_id,
                env: instance.env_name.clone(),
                n_robots: config.n_robots,
                planner: config.planner.to_string(),
                seed,
                success: validation.is_valid(),
                flowtime: Some(s.flowtime),
                makespan: Some(s.makespan),
                sum_distance: Some(sum_of_distance(&s.trajectories)),
                wall_time,
                validation,
            }
        }
        None => RunResult {
            instance_id,
            env: instance.env_name.clone(),
            n_robots: config.n_robots,
            planner: config.planner.to_string(),
            seed,
            success: false,
            flowtime: None,
            makespan: None,
            sum_distance: None,
            wall_time,
            validation: ValidationReport::default(),
        },
    };
    Ok(result)
}

fn solve(
    config: &BenchConfig,
    instance: &super::scenario::ScenarioInstance,
    params: &PlannerParams,
    deadline: Instant,
) -> Option<Solution> {
    match config.planner {
        PlannerKind::SiRrt => {
            let mut trajs = Vec::with_capacity(instance.robots.len());
            for robot in &instance.robots {
                let env = DynamicEnvironment::statics_only(instance.workspace.clone());
                let mut rp = *params;
                rp.rng_seed = params.rng_seed.wrapping_add(robot.id as u64);
                rp.v_max = robot.v_max;
                let edge = edge_model_for(config.kinodynamic, robot.v_max);
                match plan_with_model(
                    robot.start,
                    robot.goal,
                    robot.radius,
                    &env,
                    rp,
                    edge,
                    Some(deadline),
                ) {
                    Ok(Some(t)) => trajs.push(t),
                    _ => return None,
                }
            }
            Some(Solution::new(trajs))
        }
        PlannerKind::SiCpp => si_cpp_with_restarts(
            &instance.robots,
            &instance.workspace,
            params,
            config.kinodynamic,
            CPP_RESTARTS,
            Some(deadline),
        )
        .ok()
        .flatten(),
        PlannerKind::SiCcbs => si_ccbs(
            &instance.robots,
            &instance.workspace,
            params,
            CCBS_NODE_LIMIT,
            config.kinodynamic,
            Some(deadline),
        )
        .ok()
        .flatten(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

fn mean_sd(xs: &[f64]) -> Option<MeanSd> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some(MeanSd {
        mean,
        sd: var.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub successes: usize,
    pub success_rate_pct: f64,
    pub flowtime: Option<MeanSd>,
    pub makespan: Option<MeanSd>,
    pub sum_distance: Option<MeanSd>,
    pub mean_wall_time: f64,
}

/// Success rate over all runs; metric means/deviations over successful
/// runs only.
pub fn aggregate(results: &[RunResult]) -> Summary {
    let successes: Vec<&RunResult> = results.iter().filter(|r| r.success).collect();
    let pick = |f: fn(&RunResult) -> Option<f64>| -> Vec<f64> {
        successes.iter().filter_map(|r| f(r)).collect()
    };
    Summary {
        runs: results.len(),
        successes: successes.len(),
        success_rate_pct: if results.is_empty() {
            0.0
        } else {
            100.0 * successes.len() as f64 / results.len() as f64
        },
        flowtime: mean_sd(&pick(|r| r.flowtime)),
        makespan: mean_sd(&pick(|r| r.makespan)),
        sum_distance: mean_sd(&pick(|r| r.sum_distance)),
        mean_wall_time: if results.is_empty() {
            0.0
        } else {
            results.iter().map(|r| r.wall_time).sum::<f64>() / results.len() as f64
        },
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "success rate {:.1}% ({}/{})",
            self.success_rate_pct, self.successes, self.runs
        )?;
        if let Some(ft) = &self.flowtime {
            write!(f, " | flowtime {:.2} +/- {:.2} s", ft.mean, ft.sd)?;
        }
        if let Some(ms) = &self.makespan {
            write!(f, " | makespan {:.2} +/- {:.2} s", ms.mean, ms.sd)?;
        }
        if let Some(sd) = &self.sum_distance {
            write!(f, " | sum of distance {:.2} +/- {:.2} m", sd.mean, sd.sd)?;
        }
        write!(f, " | mean wall time {:.2} s", self.mean_wall_time)
    }
}
