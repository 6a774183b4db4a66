//! Anytime single-robot planner: safe-interval RRT*.
//!
//! The tree grows in the spatial configuration space only; each vertex
//! carries the earliest arrival time within one safe interval of its
//! configuration. Iterations that fail to steer or to connect do not
//! consume the iteration budget. Once a goal vertex exists the loop keeps
//! optimizing the tree, so the incumbent arrival time is non-increasing.

mod tree;

pub use tree::{Tree, Vertex};

use crate::error::{Error, Result};
use crate::geometry::{static_sweep_free, Point2, Workspace};
use crate::kinodynamic::{self, BangBangParams};
use crate::safe_interval::{
    earliest_arrival, get_safe_intervals, DynamicEnvironment, SafeInterval, SafeIntervalMap,
};
use crate::trajectory::{from_tree_path, Trajectory, Waypoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    /// Probability of sampling the goal configuration.
    pub lambda: f64,
    /// Steering range and neighbor radius (meters).
    pub d_max: f64,
    /// Iteration budget; only productive expansions consume it.
    pub iteration: u32,
    pub v_max: f64,
    pub rng_seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            d_max: 5.0,
            iteration: 1500,
            v_max: 0.5,
            rng_seed: 0,
        }
    }
}

/// Edge timing model: fixed-speed motion by default, bang-bang profiles
/// when kinodynamic constraints are enabled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeModel {
    ConstantVelocity { v_max: f64 },
    BangBang(BangBangParams),
}

impl EdgeModel {
    pub fn constant(v_max: f64) -> Self {
        EdgeModel::ConstantVelocity { v_max }
    }

    pub fn bang_bang(v_cap: f64) -> Self {
        EdgeModel::BangBang(BangBangParams::with_cap(v_cap))
    }

    pub fn travel_time(&self, a: Point2, b: Point2) -> f64 {
        match self {
            EdgeModel::ConstantVelocity { v_max } => crate::geometry::euclid(a, b) / v_max,
            EdgeModel::BangBang(p) => kinodynamic::bang_bang_arrival_time(a, b, p),
        }
    }

    /// Speed bound of trajectories produced under this model.
    pub fn max_speed(&self) -> f64 {
        match self {
            EdgeModel::ConstantVelocity { v_max } => *v_max,
            EdgeModel::BangBang(p) => p.v_cap,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn earliest_arrival(
        &self,
        from_q: Point2,
        t_ready: f64,
        depart_deadline: f64,
        to_q: Point2,
        target: &SafeInterval,
        r: f64,
        env: &DynamicEnvironment,
    ) -> Option<f64> {
        match self {
            EdgeModel::ConstantVelocity { v_max } => earliest_arrival(
                from_q,
                t_ready,
                depart_deadline,
                to_q,
                target,
                r,
                *v_max,
                env,
            ),
            EdgeModel::BangBang(p) => kinodynamic::earliest_arrival_bang_bang(
                from_q,
                t_ready,
                depart_deadline,
                to_q,
                target,
                r,
                p,
                env,
            ),
        }
    }
}

/// Goal-biased uniform sampling over the workspace rectangle.
pub fn sampling(rng: &mut ChaCha8Rng, lambda: f64, q_goal: Point2, ws: &Workspace) -> Point2 {
    if rng.random::<f64>() < lambda {
        q_goal
    } else {
        Point2::new(
            rng.random_range(0.0..=ws.width),
            rng.random_range(0.0..=ws.height),
        )
    }
}

/// Clamp `q_rand` onto the segment from `nearest_q` at distance `d_max`.
pub fn steer_toward(nearest_q: Point2, q_rand: Point2, d_max: f64) -> Point2 {
    let d = crate::geometry::euclid(nearest_q, q_rand);
    if d <= d_max {
        q_rand
    } else {
        nearest_q.offset(nearest_q.to(q_rand).scaled(d_max / d))
    }
}

pub struct SiRrt<'e> {
    env: &'e DynamicEnvironment,
    params: PlannerParams,
    edge: EdgeModel,
    radius: f64,
    q_goal: Point2,
    tree: Tree,
    si_map: SafeIntervalMap,
    t_lb: f64,
    goal_vertex: Option<usize>,
    rng: ChaCha8Rng,
    iterations_left: u32,
    attempts_left: u64,
    incumbent_history: Vec<f64>,
}

impl<'e> SiRrt<'e> {
    pub fn new(
        q_start: Point2,
        q_goal: Point2,
        radius: f64,
        env: &'e DynamicEnvironment,
        params: PlannerParams,
        edge: EdgeModel,
    ) -> Result<Self> {
        let mut si_map = SafeIntervalMap::new();
        let start_sis = si_map.get_or_compute(q_start, radius, env).to_vec();
        let start_idx = start_sis
            .iter()
            .position(|iv| iv.contains(0.0))
            .ok_or(Error::StartInfeasible)?;
        let goal_sis = si_map.get_or_compute(q_goal, radius, env).to_vec();
        let last = goal_sis.last().ok_or(Error::GoalNeverFree)?;
        if !last.is_unbounded() {
            return Err(Error::GoalNeverFree);
        }
        let t_lb = last.low;

        let mut tree = Tree::new(params.d_max);
        tree.insert(q_start, 0.0, start_sis[start_idx], start_idx, None);

        let attempts = (params.iteration as u64).saturating_mul(200).max(10_000);
        Ok(Self {
            env,
            params,
            edge,
            radius,
            q_goal,
            tree,
            si_map,
            t_lb,
            goal_vertex: None,
            rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
            iterations_left: params.iteration,
            attempts_left: attempts,
            incumbent_history: Vec::with_capacity(params.iteration as usize),
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn t_lb(&self) -> f64 {
        self.t_lb
    }

    pub fn finished(&self) -> bool {
        self.iterations_left == 0
    }

    /// Arrival time of the incumbent goal vertex (INFINITY if none).
    pub fn incumbent(&self) -> f64 {
        self.goal_vertex
            .map(|id| self.tree.vertex(id).t_low)
            .unwrap_or(f64::INFINITY)
    }

    /// Incumbent arrival after each consumed iteration.
    pub fn incumbent_history(&self) -> &[f64] {
        &self.incumbent_history
    }

    /// One loop pass; returns true iff an iteration was consumed
    /// (steering and parent selection both succeeded).
    pub fn step(&mut self) -> bool {
        if self.iterations_left == 0 {
            return false;
        }
        if self.attempts_left == 0 {
            // Safety valve for unreachable spaces: stop expanding.
            self.iterations_left = 0;
            return false;
        }
        self.attempts_left -= 1;

        let q_rand = sampling(
            &mut self.rng,
            self.params.lambda,
            self.q_goal,
            &self.env.workspace,
        );
        let Some(q_new) = self.steer(q_rand) else {
            return false;
        };
        self.si_map.get_or_compute(q_new, self.radius, self.env);
        let neighbors = self.get_neighbor(q_new);
        let new_vertices = self.choose_parent(q_new, &neighbors);
        if new_vertices.is_empty() {
            return false;
        }
        self.rewire(&new_vertices, &neighbors);

        for &id in &new_vertices {
            let v = self.tree.vertex(id);
            if v.q == self.q_goal && self.t_lb < v.t_low && v.t_low < self.incumbent() {
                self.goal_vertex = Some(id);
            }
        }

        self.iterations_left -= 1;
        self.incumbent_history.push(self.incumbent());
        true
    }

    pub fn run(&mut self, deadline: Option<Instant>) {
        while !self.finished() {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    break;
                }
            }
            self.step();
        }
    }

    /// Steered configuration toward `q_rand`, or None when the segment from
    /// the nearest vertex is statically blocked.
    pub fn steer(&self, q_rand: Point2) -> Option<Point2> {
        let near = self.tree.nearest(q_rand)?;
        let nq = self.tree.vertex(near).q;
        let q_new = steer_toward(nq, q_rand, self.params.d_max);
        if static_sweep_free(self.radius, nq, q_new, &self.env.workspace) {
            Some(q_new)
        } else {
            None
        }
    }

    /// Vertices within the closed `d_max` ball whose connecting segment is
    /// statically sweep-free, ascending by id.
    pub fn get_neighbor(&self, q_new: Point2) -> Vec<usize> {
        self.tree
            .within(q_new, self.params.d_max)
            .into_iter()
            .filter(|&id| {
                static_sweep_free(
                    self.radius,
                    self.tree.vertex(id).q,
                    q_new,
                    &self.env.workspace,
                )
            })
            .collect()
    }

    fn arrival_via(&self, from_id: usize, to_q: Point2, target: &SafeInterval) -> Option<f64> {
        let v = self.tree.vertex(from_id);
        self.edge.earliest_arrival(
            v.q,
            v.t_low,
            v.interval.high,
            to_q,
            target,
            self.radius,
            self.env,
        )
    }

    /// For each safe interval of `q_new`, create (or improve) the vertex
    /// owning it with the neighbor minimizing the arrival time. Created and
    /// improved vertices are returned.
    pub fn choose_parent(&mut self, q_new: Point2, neighbors: &[usize]) -> Vec<usize> {
        let intervals = self
            .si_map
            .get(q_new)
            .expect("safe intervals of q_new must be populated")
            .to_vec();
        let mut out = Vec::new();
        for (idx, interval) in intervals.iter().enumerate() {
            if let Some(existing) = self.tree.find(q_new, idx) {
                // One vertex per (configuration, interval): improve in place.
                let mut best = self.tree.vertex(existing).t_low;
                let mut best_parent = None;
                for &nid in neighbors {
                    if nid == existing {
                        continue;
                    }
                    if let Some(low) = self.arrival_via(nid, q_new, interval) {
                        if low < best - 1e-12 {
                            best = low;
                            best_parent = Some(nid);
                        }
                    }
                }
                if let Some(p) = best_parent {
                    self.lower_vertex(existing, best, p);
                    out.push(existing);
                }
                continue;
            }
            let mut best = f64::INFINITY;
            let mut best_parent = None;
            for &nid in neighbors {
                if let Some(low) = self.arrival_via(nid, q_new, interval) {
                    if low < best {
                        best = low;
                        best_parent = Some(nid);
                    }
                }
            }
            if let Some(p) = best_parent {
                let id = self.tree.insert(q_new, best, *interval, idx, Some(p));
                out.push(id);
            }
        }
        out
    }

    /// Reconnect neighbors through the new vertices wherever that lowers
    /// their arrival time (within each vertex's own safe interval).
    pub fn rewire(&mut self, new_vertices: &[usize], neighbors: &[usize]) {
        for &vn in new_vertices {
            for &v in neighbors {
                if v == vn || self.tree.vertex(vn).parent == Some(v) {
                    continue;
                }
                let (vq, vint, vtl) = {
                    let vv = self.tree.vertex(v);
                    (vv.q, vv.interval, vv.t_low)
                };
                if let Some(low) = self.arrival_via(vn, vq, &vint) {
                    if low < vtl - 1e-12 {
                        self.lower_vertex(v, low, vn);
                    }
                }
            }
        }
    }

    /// Apply a lowered arrival time and propagate it down the subtree so
    /// every stored t_low stays consistent with its parent edge.
    fn lower_vertex(&mut self, id: usize, new_low: f64, new_parent: usize) {
        debug_assert!(new_low >= self.tree.vertex(id).interval.low - 1e-9);
        debug_assert!(new_low < self.tree.vertex(id).interval.high);
        self.tree.reparent(id, new_parent, new_low);
        let mut stack = vec![id];
        while let Some(u) = stack.pop() {
            let children = self.tree.vertex(u).children.clone();
            for c in children {
                let (cq, cint, ctl) = {
                    let cv = self.tree.vertex(c);
                    (cv.q, cv.interval, cv.t_low)
                };
                match self.arrival_via(u, cq, &cint) {
                    Some(low) if low < ctl - 1e-12 => {
                        self.tree.set_t_low(c, low);
                        stack.push(c);
                    }
                    // The stored arrival stays feasible when it does not
                    // improve; nothing to update.
                    _ => {}
                }
            }
        }
    }

    /// Root-to-goal trajectory of the incumbent solution.
    pub fn extract_trajectory(&self) -> Result<Trajectory> {
        let Some(goal) = self.goal_vertex else {
            return Err(Error::InfeasiblePathTiming("no goal vertex".into()));
        };
        let mut chain = Vec::new();
        let mut cursor = Some(goal);
        while let Some(id) = cursor {
            let v = self.tree.vertex(id);
            chain.push((v.q, v.t_low));
            cursor = v.parent;
        }
        chain.reverse();
        match self.edge {
            EdgeModel::ConstantVelocity { v_max } => from_tree_path(&chain, self.radius, v_max),
            EdgeModel::BangBang(params) => {
                bang_bang_waypoints(&chain, self.radius, &params)
            }
        }
    }

    pub fn solution(&self) -> Option<Trajectory> {
        self.goal_vertex.and(self.extract_trajectory().ok())
    }
}

/// Sampled piecewise-linear rendering of a bang-bang chain; the same time
/// step is used for transit collision checks, so the output is consistent
/// with what was verified.
fn bang_bang_waypoints(
    chain: &[(Point2, f64)],
    radius: f64,
    params: &BangBangParams,
) -> Result<Trajectory> {
    let dt = kinodynamic::BB_SAMPLE_DT;
    let mut wps = vec![Waypoint::new(chain[0].0, chain[0].1)];
    let mut cur_t = chain[0].1;
    for win in chain.windows(2) {
        let (pq, _) = win[0];
        let (cq, ct) = win[1];
        let seg = kinodynamic::bang_bang_connect(pq, cq, params);
        let dur = seg.duration();
        let depart = ct - dur;
        if depart < cur_t - 1e-9 {
            return Err(Error::InfeasiblePathTiming(format!(
                "arrival {ct} too early for bang-bang duration {dur}"
            )));
        }
        if depart > cur_t + 1e-9 {
            wps.push(Waypoint::new(pq, depart));
        }
        let steps = (dur / dt).ceil().max(1.0) as usize;
        for i in 1..steps {
            let tau = dur * i as f64 / steps as f64;
            wps.push(Waypoint::new(seg.position(tau), depart + tau));
        }
        wps.push(Waypoint::new(cq, ct));
        cur_t = ct;
    }
    Trajectory::new(wps, radius, params.v_cap)
}

/// Plans a single robot. Returns Ok(None) when the budget expires without
/// connecting the goal; errors when the start or goal is unusable.
pub fn plan(
    q_start: Point2,
    q_goal: Point2,
    radius: f64,
    env: &DynamicEnvironment,
    params: PlannerParams,
) -> Result<Option<Trajectory>> {
    plan_with_model(
        q_start,
        q_goal,
        radius,
        env,
        params,
        EdgeModel::constant(params.v_max),
        None,
    )
}

pub fn plan_with_model(
    q_start: Point2,
    q_goal: Point2,
    radius: f64,
    env: &DynamicEnvironment,
    params: PlannerParams,
    edge: EdgeModel,
    deadline: Option<Instant>,
) -> Result<Option<Trajectory>> {
    if q_start == q_goal {
        let sis = get_safe_intervals(q_start, radius, env);
        if !sis.iter().any(|iv| iv.contains(0.0)) {
            return Err(Error::StartInfeasible);
        }
        match sis.last() {
            Some(last) if last.is_unbounded() => {
                if last.contains(0.0) {
                    // Already at the goal and free forever: hold in place.
                    return Ok(Some(Trajectory::stationary(
                        q_start,
                        radius,
                        edge.max_speed(),
                    )));
                }
            }
            _ => return Err(Error::GoalNeverFree),
        }
    }
    let mut planner = SiRrt::new(q_start, q_goal, radius, env, params, edge)?;
    planner.run(deadline);
    Ok(planner.solution())
}
