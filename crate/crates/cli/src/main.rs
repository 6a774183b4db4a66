//! `siplan`: generate scenarios, plan trajectories, run benchmark suites,
//! validate solutions, and render SVG snapshots.
//!
//! Exit codes: 0 success, 1 planning failure, 2 invalid input, 3 internal
//! error.

use clap::{Args, Parser, Subcommand};
use siplan_core::error::Error;
use siplan_core::harness::{
    self, aggregate, export::scenario_from_json, export::solution_from_json, generate_instance,
    EnvKind, PlannerKind, ScenarioInstance,
};
use siplan_core::highlevel::{
    si_ccbs, si_cpp_with_restarts, validate, Solution,
};
use siplan_core::safe_interval::DynamicEnvironment;
use siplan_core::sirrt::{plan_with_model, EdgeModel, PlannerParams};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Parser)]
#[command(name = "siplan", version, about = "Safe-interval multi-robot path planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PlannerArgs {
    /// Planner: si-rrt, si-cpp, or si-ccbs.
    #[arg(long, default_value = "si-cpp")]
    planner: String,
    /// Iteration budget per single-robot plan.
    #[arg(long, default_value_t = 1500)]
    iterations: u32,
    /// Goal-sampling probability.
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    /// Steering range / neighbor radius in meters.
    #[arg(long, default_value_t = 5.0)]
    dmax: f64,
    /// Maximum robot speed in m/s.
    #[arg(long, default_value_t = 0.5)]
    vmax: f64,
    /// Planner RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    /// Use the bang-bang (acceleration-bounded) edge model.
    #[arg(long)]
    kinodynamic: bool,
}

impl PlannerArgs {
    fn params(&self) -> PlannerParams {
        PlannerParams {
            lambda: self.lambda,
            d_max: self.dmax,
            iteration: self.iterations,
            v_max: self.vmax,
            rng_seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario and write it as JSON.
    Generate {
        /// Environment: circ10, circ20, rect10, or rect20.
        #[arg(long, default_value = "circ10")]
        env: String,
        /// Number of robots.
        #[arg(long, default_value_t = 20)]
        robots: usize,
        /// Instance seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum robot speed in m/s.
        #[arg(long, default_value_t = 0.5)]
        vmax: f64,
        /// Draw robot radii uniformly from [0.3, 0.7] m.
        #[arg(long)]
        hetero_radii: bool,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan trajectories for a scenario file and write the solution JSON.
    Plan {
        /// Scenario JSON path.
        scenario: PathBuf,
        #[command(flatten)]
        planner: PlannerArgs,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a batch of generated instances and write a results CSV.
    Bench {
        /// Environment: circ10, circ20, rect10, or rect20.
        #[arg(long, default_value = "circ10")]
        env: String,
        /// Number of robots per instance.
        #[arg(long, default_value_t = 20)]
        robots: usize,
        /// Number of instances (seeds 0..n).
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[command(flatten)]
        planner: PlannerArgs,
        /// Draw robot radii uniformly from [0.3, 0.7] m.
        #[arg(long)]
        hetero_radii: bool,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a solution against its scenario with the dense validator.
    Validate {
        /// Scenario JSON path.
        scenario: PathBuf,
        /// Solution JSON path.
        solution: PathBuf,
    },
    /// Render a scenario (and optionally a solution) to SVG.
    Render {
        /// Scenario JSON path.
        scenario: PathBuf,
        /// Solution JSON path.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::StartInfeasible | Error::GoalNeverFree => ExitCode::from(1),
                Error::InvalidInput(_) | Error::Json(_) | Error::InstanceGeneration(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Generate {
            env,
            robots,
            seed,
            vmax,
            hetero_radii,
            out,
        } => {
            let kind = EnvKind::from_str(&env)?;
            let instance = generate_instance(kind, robots, hetero_radii, vmax, seed)?;
            harness::write_scenario(&instance, &out)?;
            println!(
                "wrote {} ({} robots, {} obstacles, seed {seed})",
                out.display(),
                instance.robots.len(),
                instance.workspace.static_obstacles.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan { scenario, planner, out } => {
            let instance = read_scenario_checked(&scenario)?;
            let kind = PlannerKind::from_str(&planner.planner)?;
            let deadline = Instant::now() + Duration::from_secs_f64(planner.time_limit);
            let params = planner.params();
            let solution = solve(&instance, kind, &params, planner.kinodynamic, deadline)?;
            match solution {
                Some(s) => {
                    harness::write_solution(&s, &out)?;
                    println!(
                        "wrote {} (flowtime {:.2} s, makespan {:.2} s)",
                        out.display(),
                        s.flowtime,
                        s.makespan
                    );
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("planning failed within the limits");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Bench {
            env,
            robots,
            instances,
            planner,
            hetero_radii,
            out,
        } => {
            let config = harness::BenchConfig {
                env: EnvKind::from_str(&env)?,
                n_robots: robots,
                n_instances: instances,
                time_limit: planner.time_limit,
                planner: PlannerKind::from_str(&planner.planner)?,
                params: planner.params(),
                kinodynamic: planner.kinodynamic,
                heterogeneous_radii: hetero_radii,
            };
            let results = harness::run(&config)?;
            harness::export::export_csv(&results, &out)?;
            println!("{}", aggregate(&results));
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario, solution } => {
            let instance = read_scenario_checked(&scenario)?;
            let text = std::fs::read_to_string(&solution)?;
            let sol = solution_from_json(&text, &instance.robots)?;
            let report = validate(&sol, &instance.robots, &instance.workspace);
            println!("{report}");
            if report.is_valid() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Render {
            scenario,
            solution,
            out,
        } => {
            let instance = read_scenario_checked(&scenario)?;
            let sol = match solution {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    Some(solution_from_json(&text, &instance.robots)?)
                }
                None => None,
            };
            harness::export_svg(&instance, sol.as_ref(), &out)?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_scenario_checked(path: &PathBuf) -> Result<ScenarioInstance, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    scenario_from_json(&text)
}

fn solve(
    instance: &ScenarioInstance,
    kind: PlannerKind,
    params: &PlannerParams,
    kinodynamic: bool,
    deadline: Instant,
) -> Result<Option<Solution>, Error> {
    match kind {
        PlannerKind::SiRrt => {
            let mut trajs = Vec::with_capacity(instance.robots.len());
            for robot in &instance.robots {
                let env = DynamicEnvironment::statics_only(instance.workspace.clone());
                let mut rp = *params;
                rp.rng_seed = params.rng_seed.wrapping_add(robot.id as u64);
                rp.v_max = robot.v_max;
                let edge = if kinodynamic {
                    EdgeModel::bang_bang(robot.v_max)
                } else {
                    EdgeModel::constant(robot.v_max)
                };
                match plan_with_model(
                    robot.start,
                    robot.goal,
                    robot.radius,
                    &env,
                    rp,
                    edge,
                    Some(deadline),
                )? {
                    Some(t) => trajs.push(t),
                    None => return Ok(None),
                }
            }
            Ok(Some(Solution::new(trajs)))
        }
        PlannerKind::SiCpp => si_cpp_with_restarts(
            &instance.robots,
            &instance.workspace,
            params,
            kinodynamic,
            harness::runner::CPP_RESTARTS,
            Some(deadline),
        ),
        PlannerKind::SiCcbs => si_ccbs(
            &instance.robots,
            &instance.workspace,
            params,
            harness::runner::CCBS_NODE_LIMIT,
            kinodynamic,
            Some(deadline),
        ),
    }
}
