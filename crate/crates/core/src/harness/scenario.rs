//! Randomized scenario generation: the four obstacle profiles (circular or
//! rectangular obstacles at 10% or 20% area density) in a 40 m x 40 m
//! workspace, with rejection-sampled starts and goals.

use crate::error::{Error, Result};
use crate::geometry::{
    euclid, static_point_free, Disc, MovingDiscSegment, Point2, StaticObstacle, Workspace,
};
use crate::highlevel::RobotSpec;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const WORKSPACE_SIZE: f64 = 40.0;
pub const DEFAULT_ROBOT_RADIUS: f64 = 0.5;
/// Heterogeneous radii are drawn uniformly from this range.
pub const HETERO_RADIUS_RANGE: (f64, f64) = (0.3, 0.7);
const CIRCLE_RADIUS_RANGE: (f64, f64) = (0.5, 2.0);
const RECT_SIDE_RANGE: (f64, f64) = (1.0, 4.0);
const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Circ10,
    Circ20,
    Rect10,
    Rect20,
}

impl EnvKind {
    pub fn density(&self) -> f64 {
        match self {
            EnvKind::Circ10 | EnvKind::Rect10 => 0.10,
            EnvKind::Circ20 | EnvKind::Rect20 => 0.20,
        }
    }

    pub fn circular(&self) -> bool {
        matches!(self, EnvKind::Circ10 | EnvKind::Circ20)
    }

    pub const ALL: [EnvKind; 4] = [
        EnvKind::Circ10,
        EnvKind::Circ20,
        EnvKind::Rect10,
        EnvKind::Rect20,
    ];
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EnvKind::Circ10 => "circ10",
            EnvKind::Circ20 => "circ20",
            EnvKind::Rect10 => "rect10",
            EnvKind::Rect20 => "rect20",
        };
        write!(f, "{s}")
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circ10" => Ok(EnvKind::Circ10),
            "circ20" => Ok(EnvKind::Circ20),
            "rect10" => Ok(EnvKind::Rect10),
            "rect20" => Ok(EnvKind::Rect20),
            other => Err(Error::InvalidInput(format!("unknown environment {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInstance {
    pub env_name: String,
    pub workspace: Workspace,
    pub robots: Vec<RobotSpec>,
    pub seed: u64,
}

/// Deterministic scenario for `(kind, n_robots, hetero, v_max, seed)`.
/// Obstacles are added until their summed area reaches the density target
/// (overlap not subtracted); starts and goals are rejection-sampled to be
/// statically free and mutually clear.
pub fn generate_instance(
    kind: EnvKind,
    n_robots: usize,
    hetero_radii: bool,
    v_max: f64,
    seed: u64,
) -> Result<ScenarioInstance> {
    if n_robots == 0 {
        return Err(Error::InvalidInput("n_robots must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = WORKSPACE_SIZE;
    let target_area = kind.density() * size * size;

    let mut obstacles = Vec::new();
    let mut area = 0.0;
    while area < target_area {
        let obs = if kind.circular() {
            let r = rng.random_range(CIRCLE_RADIUS_RANGE.0..=CIRCLE_RADIUS_RANGE.1);
            let c = Point2::new(
                rng.random_range(r..=size - r),
                rng.random_range(r..=size - r),
            );
            StaticObstacle::Circle { center: c, radius: r }
        } else {
            let w = rng.random_range(RECT_SIDE_RANGE.0..=RECT_SIDE_RANGE.1);
            let h = rng.random_range(RECT_SIDE_RANGE.0..=RECT_SIDE_RANGE.1);
            let x = rng.random_range(0.0..=size - w);
            let y = rng.random_range(0.0..=size - h);
            StaticObstacle::Rect {
                min: Point2::new(x, y),
                max: Point2::new(x + w, y + h),
            }
        };
        area += obs.area();
        obstacles.push(obs);
    }
    let workspace = Workspace::with_obstacles(size, size, obstacles);

    let radii: Vec<f64> = (0..n_robots)
        .map(|_| {
            if hetero_radii {
                rng.random_range(HETERO_RADIUS_RANGE.0..=HETERO_RADIUS_RANGE.1)
            } else {
                DEFAULT_ROBOT_RADIUS
            }
        })
        .collect();

    let mut robots: Vec<RobotSpec> = Vec::with_capacity(n_robots);
    let mut attempts = 0usize;
    for (id, &radius) in radii.iter().enumerate() {
        let start = place_free(&mut rng, &workspace, radius, &mut attempts, |p, r| {
            robots.iter().all(|other| {
                euclid(p, other.start) >= 2.0 * (r + other.radius)
                    && euclid(p, other.goal) >= r + other.radius
            })
        })?;
        let goal = place_free(&mut rng, &workspace, radius, &mut attempts, |p, r| {
            robots.iter().all(|other| {
                euclid(p, other.goal) >= 2.0 * (r + other.radius)
                    && euclid(p, other.start) >= r + other.radius
            })
        })?;
        robots.push(RobotSpec {
            id,
            start,
            goal,
            radius,
            v_max,
        });
    }

    Ok(ScenarioInstance {
        env_name: kind.to_string(),
        workspace,
        robots,
        seed,
    })
}

fn place_free(
    rng: &mut ChaCha8Rng,
    workspace: &Workspace,
    radius: f64,
    attempts: &mut usize,
    clear_of_others: impl Fn(Point2, f64) -> bool,
) -> Result<Point2> {
    loop {
        *attempts += 1;
        if *attempts > MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::InstanceGeneration(
                "no free placement found within the attempt budget".into(),
            ));
        }
        let p = Point2::new(
            rng.random_range(radius..=workspace.width - radius),
            rng.random_range(radius..=workspace.height - radius),
        );
        if static_point_free(&Disc::new(p, radius), workspace) && clear_of_others(p, radius) {
            return Ok(p);
        }
    }
}

/// Random piecewise-linear obstacle trajectories (1-3 legs at the given
/// speed, then a permanent hold), for single-robot experiments. Initial
/// positions and permanent holds keep a margin from the `keep_out` discs
/// (typically the robot's start and goal), so the start stays usable at
/// t=0 and the goal stays permanently reachable; legs in between may cross
/// them freely.
pub fn random_dynamic_obstacles(
    workspace: &Workspace,
    count: usize,
    radius: f64,
    speed: f64,
    seed: u64,
    keep_out: &[(Point2, f64)],
) -> Vec<MovingDiscSegment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clear = |p: Point2| {
        keep_out
            .iter()
            .all(|&(q, r)| euclid(p, q) > radius + r + 0.5)
    };
    let sample_clear = |rng: &mut ChaCha8Rng| loop {
        let p = Point2::new(
            rng.random_range(radius..=workspace.width - radius),
            rng.random_range(radius..=workspace.height - radius),
        );
        if clear(p) {
            return p;
        }
    };
    let mut segs = Vec::new();
    for _ in 0..count {
        let mut t = 0.0;
        let mut pos = sample_clear(&mut rng);
        let legs = rng.random_range(1..=3);
        for leg in 0..legs {
            let next = if leg + 1 == legs {
                sample_clear(&mut rng)
            } else {
                Point2::new(
                    rng.random_range(radius..=workspace.width - radius),
                    rng.random_range(radius..=workspace.height - radius),
                )
            };
            let dur = euclid(pos, next) / speed;
            if dur > 0.0 {
                segs.push(MovingDiscSegment::new(radius, pos, next, t, t + dur));
                t += dur;
                pos = next;
            }
        }
        segs.push(MovingDiscSegment::stationary(radius, pos, t, f64::INFINITY));
    }
    segs
}
