//! Benchmark harness: scenario generation, experiment orchestration with
//! wall-clock limits, metric aggregation, and JSON/CSV/SVG exports.

pub mod export;
pub mod runner;
pub mod scenario;

pub use export::{
    export_csv, export_svg, read_scenario, read_solution, write_scenario, write_solution,
};
pub use runner::{aggregate, run, sum_of_distance, BenchConfig, PlannerKind, RunResult, Summary};
pub use scenario::{generate_instance, random_dynamic_obstacles, EnvKind, ScenarioInstance};
