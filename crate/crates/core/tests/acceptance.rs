//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success). Oracles here are
//! written against plain tuple math so they stay independent of the
//! library's geometry paths.

use siplan_core::geometry::{euclid, MovingDiscSegment, Point2, Workspace};
use siplan_core::harness::{
    aggregate, generate_instance, random_dynamic_obstacles, run, BenchConfig, EnvKind,
    PlannerKind,
};
use siplan_core::highlevel::{detect_conflicts, si_ccbs, si_cpp};
use siplan_core::kinodynamic::{bang_bang_arrival_time, bang_bang_connect, BangBangParams};
use siplan_core::safe_interval::{earliest_arrival, get_safe_intervals, DynamicEnvironment, SafeInterval};
use siplan_core::sirrt::{EdgeModel, PlannerParams, SiRrt};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} {criterion}: {detail}");
    assert!(pass, "{criterion}: {detail}");
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

const INF: f64 = f64::INFINITY;

/// Criterion 1: SI-CPP on 20 circ10 instances with 20 robots (seeds 0-19),
/// 60 s per instance: success rate >= 90% and every claimed solution passes
/// the independent validator.
#[test]
fn criterion_1_si_cpp_validity() {
    let config = BenchConfig {
        env: EnvKind::Circ10,
        n_robots: 20,
        n_instances: 20,
        time_limit: 60.0,
        planner: PlannerKind::SiCpp,
        params: PlannerParams::default(),
        kinodynamic: false,
        heterogeneous_radii: false,
    };
    let results = run(&config).expect("batch must run");
    let solutions = results.iter().filter(|r| r.flowtime.is_some()).count();
    let clean = results
        .iter()
        .filter(|r| r.flowtime.is_some() && r.validation.is_valid())
        .count();
    let successes = results.iter().filter(|r| r.success).count();
    let summary = aggregate(&results);
    let pass = clean == solutions && successes * 10 >= results.len() * 9;
    report(
        "criterion 1 (SI-CPP validity, circ10 x20 robots)",
        pass,
        &format!(
            "{successes}/{} succeeded, {clean}/{solutions} solutions validator-clean | {summary}",
            results.len()
        ),
    );
}

/// Criterion 2: anytime convergence with 60 random dynamic obstacles over
/// 30 seeds; the incumbent arrival is non-increasing in every run, the
/// median at 1500 iterations does not exceed the median at 300, and at
/// least 70% of seeds strictly improve after iteration 300.
#[test]
fn criterion_2_anytime_convergence() {
    let start = p(5.0, 5.0);
    let goal = p(35.0, 35.0);
    let keep_out = [(start, 0.5), (goal, 0.5)];
    let mut at_300 = Vec::new();
    let mut at_1500 = Vec::new();
    let mut improved = 0usize;
    let seeds = 30u64;
    for seed in 0..seeds {
        let ws = Workspace::new(40.0, 40.0);
        let moving = random_dynamic_obstacles(&ws, 60, 0.5, 0.5, seed, &keep_out);
        let env = DynamicEnvironment::with_moving(ws, moving);
        let params = PlannerParams {
            rng_seed: seed,
            ..PlannerParams::default()
        };
        let mut planner = SiRrt::new(start, goal, 0.5, &env, params, EdgeModel::constant(0.5))
            .expect("start and goal stay usable under keep-outs");
        planner.run(None);
        let hist = planner.incumbent_history();
        assert_eq!(hist.len(), 1500, "seed {seed} must consume 1500 iterations");
        for w in hist.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-9,
                "seed {seed}: incumbent increased {} -> {}",
                w[0],
                w[1]
            );
        }
        at_300.push(hist[299]);
        at_1500.push(hist[1499]);
        if hist[1499] < hist[299] {
            improved += 1;
        }
    }
    let median = |xs: &[f64]| {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let m300 = median(&at_300);
    let m1500 = median(&at_1500);
    let pass = m1500 <= m300 && improved * 10 >= seeds as usize * 7;
    report(
        "criterion 2 (anytime convergence, 60 obstacles, 30 seeds)",
        pass,
        &format!(
            "median incumbent {m300:.2} s @300 -> {m1500:.2} s @1500, strict improvement {improved}/{seeds}"
        ),
    );
}

// --- independent oracle machinery for criteria 3 and 4 -----------------

type Pt = (f64, f64);

fn o_sub(a: Pt, b: Pt) -> Pt {
    (a.0 - b.0, a.1 - b.1)
}

fn o_dot(a: Pt, b: Pt) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn o_point_seg_dist_sq(q: Pt, a: Pt, b: Pt) -> f64 {
    let ab = o_sub(b, a);
    let len_sq = o_dot(ab, ab);
    if len_sq <= 0.0 {
        let d = o_sub(q, a);
        return o_dot(d, d);
    }
    let t = (o_dot(o_sub(q, a), ab) / len_sq).clamp(0.0, 1.0);
    let c = (a.0 + ab.0 * t, a.1 + ab.1 * t);
    let d = o_sub(q, c);
    o_dot(d, d)
}

fn seg_pos(seg: &MovingDiscSegment, t: f64) -> Pt {
    if seg.p_start == seg.p_end {
        return (seg.p_start.x, seg.p_start.y);
    }
    let s = (t - seg.t_start) / (seg.t_end - seg.t_start);
    (
        seg.p_start.x + (seg.p_end.x - seg.p_start.x) * s,
        seg.p_start.y + (seg.p_end.y - seg.p_start.y) * s,
    )
}

/// Exact transit check at one departure time, written against tuple math.
fn oracle_transit_blocked(
    from: Point2,
    to: Point2,
    v_max: f64,
    t_dep: f64,
    r: f64,
    obstacles: &[MovingDiscSegment],
) -> bool {
    let dist = euclid(from, to);
    let travel = dist / v_max;
    for seg in obstacles {
        let rho = r + seg.radius;
        let t0 = t_dep.max(seg.t_start);
        let t1 = (t_dep + travel).min(seg.t_end);
        if t0 > t1 {
            continue;
        }
        let robot_at = |t: f64| -> Pt {
            let s = (t - t_dep) / travel;
            (
                from.x + (to.x - from.x) * s,
                from.y + (to.y - from.y) * s,
            )
        };
        let rel0 = o_sub(robot_at(t0), seg_pos(seg, t0));
        let rel1 = o_sub(robot_at(t1), seg_pos(seg, t1));
        if o_point_seg_dist_sq((0.0, 0.0), rel0, rel1) < rho * rho - 1e-9 {
            return true;
        }
    }
    false
}

/// Departure-time sweep at fixed resolution; infeasible once the grid up
/// to the quiet cap is exhausted.
#[allow(clippy::too_many_arguments)]
fn oracle_earliest_arrival(
    from: Point2,
    t_ready: f64,
    deadline: f64,
    to: Point2,
    target: &SafeInterval,
    r: f64,
    v_max: f64,
    obstacles: &[MovingDiscSegment],
    delta: f64,
) -> Option<f64> {
    let travel = euclid(from, to) / v_max;
    let dep_lo = t_ready.max(target.low - travel);
    let dep_hi = deadline.min(target.high - travel);
    if dep_lo >= dep_hi {
        return None;
    }
    let quiet = obstacles
        .iter()
        .map(|s| if s.t_end.is_finite() { s.t_end } else { s.t_start })
        .fold(0.0f64, f64::max)
        + travel
        + delta;
    let cap = dep_hi.min(quiet.max(dep_lo + delta));
    let mut t = dep_lo;
    while t < cap {
        if !oracle_transit_blocked(from, to, v_max, t, r, obstacles) {
            return Some(t + travel);
        }
        t += delta;
    }
    if cap < dep_hi && !oracle_transit_blocked(from, to, v_max, cap, r, obstacles) {
        return Some(cap + travel);
    }
    None
}

fn random_obstacles(rng: &mut ChaCha8Rng, n: usize) -> Vec<MovingDiscSegment> {
    let mut segs = Vec::new();
    for _ in 0..n {
        let r = rng.random_range(0.25..0.8);
        let mut t = rng.random_range(0.0..6.0);
        let mut pos = p(rng.random_range(4.0..36.0), rng.random_range(4.0..36.0));
        for _ in 0..rng.random_range(1..=2) {
            let next = p(rng.random_range(4.0..36.0), rng.random_range(4.0..36.0));
            let speed = rng.random_range(0.2..0.9);
            let dur = euclid(pos, next) / speed;
            if dur <= 0.0 {
                continue;
            }
            segs.push(MovingDiscSegment::new(r, pos, next, t, t + dur));
            t += dur;
            pos = next;
        }
        segs.push(MovingDiscSegment::stationary(r, pos, t, INF));
    }
    segs
}

/// Criterion 3: the exact earliest-arrival solver matches a 1e-4 s
/// departure-time sweep oracle within 2e-3 s on 200 random single-edge
/// fixtures, including agreement on infeasibility.
#[test]
fn criterion_3_earliest_arrival_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut feasible = 0;
    let mut infeasible = 0;
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n_obstacles = rng.random_range(2..=5);
        let obstacles = random_obstacles(&mut rng, n_obstacles);
        let env = DynamicEnvironment::with_moving(Workspace::new(40.0, 40.0), obstacles.clone());
        let from = p(rng.random_range(4.0..36.0), rng.random_range(4.0..36.0));
        let to = p(rng.random_range(4.0..36.0), rng.random_range(4.0..36.0));
        let t_ready = rng.random_range(0.0..6.0);
        let deadline = if rng.random_range(0.0..1.0f64) < 0.6 {
            t_ready + rng.random_range(0.5..25.0)
        } else {
            INF
        };
        let low = rng.random_range(0.0..20.0);
        let target = SafeInterval {
            low,
            high: if rng.random_range(0.0..1.0f64) < 0.5 {
                low + rng.random_range(1.0..40.0)
            } else {
                INF
            },
        };
        let got = earliest_arrival(from, t_ready, deadline, to, &target, 0.5, 0.5, &env);
        let want = oracle_earliest_arrival(
            from, t_ready, deadline, to, &target, 0.5, 0.5, &obstacles, 1e-4,
        );
        match (got, want) {
            (None, None) => infeasible += 1,
            (Some(g), Some(w)) => {
                let diff = (g - w).abs();
                worst = worst.max(diff);
                assert!(
                    diff <= 2e-3,
                    "case {case}: exact {g} vs sweep {w} (diff {diff})"
                );
                feasible += 1;
            }
            other => panic!("case {case}: feasibility disagreement {other:?}"),
        }
    }
    report(
        "criterion 3 (earliest-arrival oracle equivalence, 200 fixtures)",
        true,
        &format!("{feasible} feasible / {infeasible} infeasible, worst diff {worst:.2e} s"),
    );
}

/// Criterion 4: on 100 random configurations, dense sampling at 1e-3 s over
/// [0, 200] s confirms freedom inside every returned safe interval and
/// collision inside every gap (2e-3 s boundary tolerance).
#[test]
fn criterion_4_safe_interval_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked_samples = 0usize;
    for case in 0..100 {
        let kind = EnvKind::ALL[case % 4];
        let instance = generate_instance(kind, 1, false, 0.5, case as u64).unwrap();
        let obstacles = random_obstacles(&mut rng, 20);
        let env =
            DynamicEnvironment::with_moving(instance.workspace.clone(), obstacles.clone());
        let q = p(rng.random_range(1.0..39.0), rng.random_range(1.0..39.0));
        let r = 0.5;
        let sis = get_safe_intervals(q, r, &env);
        // Statics checked through an independent formulation.
        let statically_free = {
            let inside = q.x >= r && q.x <= 40.0 - r && q.y >= r && q.y <= 40.0 - r;
            inside
                && instance.workspace.static_obstacles.iter().all(|o| {
                    use siplan_core::geometry::StaticObstacle;
                    match *o {
                        StaticObstacle::Circle { center, radius } => {
                            euclid(q, center) > radius + r
                        }
                        StaticObstacle::Rect { min, max } => {
                            let dx = (min.x - q.x).max(0.0).max(q.x - max.x);
                            let dy = (min.y - q.y).max(0.0).max(q.y - max.y);
                            (dx * dx + dy * dy).sqrt() > r
                        }
                    }
                })
        };
        if !statically_free {
            assert!(sis.is_empty(), "case {case}: blocked config must have no SIs");
            continue;
        }
        // Obstacles that can never reach q (coarse AABB test).
        let near: Vec<&MovingDiscSegment> = obstacles
            .iter()
            .filter(|s| {
                let rho = r + s.radius;
                let min_x = s.p_start.x.min(s.p_end.x) - rho;
                let max_x = s.p_start.x.max(s.p_end.x) + rho;
                let min_y = s.p_start.y.min(s.p_end.y) - rho;
                let max_y = s.p_start.y.max(s.p_end.y) + rho;
                q.x >= min_x && q.x <= max_x && q.y >= min_y && q.y <= max_y
            })
            .collect();
        let boundary_close = |t: f64| {
            sis.iter().any(|iv| {
                (t - iv.low).abs() <= 2e-3
                    || (iv.high.is_finite() && (t - iv.high).abs() <= 2e-3)
            })
        };
        let mut t = 0.0;
        while t <= 200.0 {
            if !boundary_close(t) {
                let colliding = near.iter().any(|s| {
                    if t < s.t_start || t > s.t_end {
                        return false;
                    }
                    let pos = seg_pos(s, t);
                    let d = o_sub((q.x, q.y), pos);
                    o_dot(d, d) < (r + s.radius) * (r + s.radius)
                });
                let inside_si = sis.iter().any(|iv| t >= iv.low && t < iv.high);
                assert_eq!(
                    inside_si, !colliding,
                    "case {case}: t={t} inside_si={inside_si} colliding={colliding} q={q:?}"
                );
                checked_samples += 1;
            }
            t += 1e-3;
        }
    }
    report(
        "criterion 4 (safe-interval dense-time correctness, 100 configs)",
        true,
        &format!("{checked_samples} samples agreed"),
    );
}

/// Criterion 5: instrumented small runs hold the tree invariants at every
/// iteration: t_low inside the owning interval, per-edge consistency of
/// t_low under re-evaluation (1e-3 s), acyclicity, non-increasing incumbent.
#[test]
fn criterion_5_tree_invariants() {
    let mut edges_checked = 0usize;
    for seed in 0..3u64 {
        let ws = Workspace::new(40.0, 40.0);
        let keep_out = [(p(5.0, 5.0), 0.5), (p(35.0, 35.0), 0.5)];
        let moving = random_dynamic_obstacles(&ws, 20, 0.5, 0.5, seed + 50, &keep_out);
        let env = DynamicEnvironment::with_moving(ws, moving);
        let params = PlannerParams {
            iteration: 200,
            rng_seed: seed,
            ..PlannerParams::default()
        };
        let edge = EdgeModel::constant(0.5);
        let mut planner =
            SiRrt::new(p(5.0, 5.0), p(35.0, 35.0), 0.5, &env, params, edge).unwrap();
        let mut last_incumbent = INF;
        while !planner.finished() {
            if !planner.step() {
                continue;
            }
            let inc = planner.incumbent();
            assert!(inc <= last_incumbent + 1e-9, "incumbent must not increase");
            last_incumbent = inc;
            for v in planner.tree().vertices() {
                assert!(v.t_low >= v.interval.low - 1e-9);
                assert!(v.t_low < v.interval.high);
                // Acyclic walk to the root.
                let mut hops = 0;
                let mut cur = v.parent;
                while let Some(id) = cur {
                    hops += 1;
                    assert!(hops <= planner.tree().len(), "cycle detected");
                    cur = planner.tree().vertex(id).parent;
                }
                if let Some(pid) = v.parent {
                    let pv = planner.tree().vertex(pid);
                    let redo = edge
                        .earliest_arrival(
                            pv.q,
                            pv.t_low,
                            pv.interval.high,
                            v.q,
                            &v.interval,
                            0.5,
                            &env,
                        )
                        .expect("stored edges stay feasible");
                    assert!(
                        (redo - v.t_low).abs() <= 1e-3,
                        "edge {}->{}: recomputed {} vs stored {}",
                        pid,
                        v.id,
                        redo,
                        v.t_low
                    );
                    edges_checked += 1;
                }
            }
        }
    }
    report(
        "criterion 5 (tree invariants on instrumented runs)",
        true,
        &format!("{edges_checked} edge re-evaluations consistent"),
    );
}

/// Criterion 6: on 20 instances with 2-10 robots, where both planners
/// succeed the median SI-CCBS flowtime does not exceed the median SI-CPP
/// flowtime, and every SI-CCBS solution has zero conflicts. The instances
/// put robots on a circle with antipodal goals so conflicts actually occur
/// and the resolution strategies are exercised.
#[test]
fn criterion_6_ccbs_quality() {
    use siplan_core::highlevel::RobotSpec;
    let mut ccbs_flow = Vec::new();
    let mut cpp_flow = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    for i in 0..20usize {
        let n_robots = 2 + (i % 9);
        let circle_r = 8.0 + (i % 3) as f64 * 2.0;
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let workspace = Workspace::new(40.0, 40.0);
        let robots: Vec<RobotSpec> = (0..n_robots)
            .map(|k| {
                let theta = phase + std::f64::consts::TAU * k as f64 / n_robots as f64;
                let start = p(20.0 + circle_r * theta.cos(), 20.0 + circle_r * theta.sin());
                let goal = p(20.0 - circle_r * theta.cos(), 20.0 - circle_r * theta.sin());
                RobotSpec {
                    id: k,
                    start,
                    goal,
                    radius: 0.5,
                    v_max: 0.5,
                }
            })
            .collect();
        let params = PlannerParams {
            iteration: 600,
            rng_seed: i as u64,
            ..PlannerParams::default()
        };
        let order: Vec<usize> = (0..n_robots).collect();
        let cpp = si_cpp(&robots, &workspace, &params, &order, false, None).unwrap();
        let ccbs = si_ccbs(&robots, &workspace, &params, 300, false, None).unwrap();
        if let (Some(a), Some(b)) = (ccbs, cpp) {
            assert!(
                detect_conflicts(&a.trajectories).is_empty(),
                "instance {i}: ccbs returned a conflicting solution"
            );
            ccbs_flow.push(a.flowtime);
            cpp_flow.push(b.flowtime);
        }
    }
    let both = ccbs_flow.len();
    let median = |xs: &[f64]| {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let mc = median(&ccbs_flow);
    let mp = median(&cpp_flow);
    let pass = both >= 10 && mc <= mp;
    report(
        "criterion 6 (SI-CCBS quality vs SI-CPP)",
        pass,
        &format!("both succeeded on {both}/20, median flowtime ccbs {mc:.2} vs cpp {mp:.2}"),
    );
}

/// Criterion 7: bang-bang formula cases to 1e-9, endpoint position and
/// velocity errors <= 1e-9, per-axis acceleration within the bound.
#[test]
fn criterion_7_bang_bang() {
    let params = BangBangParams {
        a_max: 1.0,
        v_cap: INF,
    };
    let seg = bang_bang_connect(p(0.0, 0.0), p(2.0, 0.0), &params);
    let c1 = (seg.t_accel - 2f64.sqrt()).abs() <= 1e-9;
    let seg2 = bang_bang_connect(p(0.0, 0.0), p(1.0, 1.0), &params);
    let c2 = (seg2.t_accel - 1.0).abs() <= 1e-9
        && (bang_bang_arrival_time(p(0.0, 0.0), p(1.0, 1.0), &params) - 2.0).abs() <= 1e-9;

    let mut endpoint_ok = true;
    let mut accel_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a = p(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let b = p(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let capped = BangBangParams {
            a_max: 1.0,
            v_cap: if rng.random_range(0.0..1.0f64) < 0.5 { 0.5 } else { INF },
        };
        let seg = bang_bang_connect(a, b, &capped);
        endpoint_ok &= euclid(seg.position(seg.duration()), b) <= 1e-9;
        endpoint_ok &= seg.velocity(seg.duration()).norm() <= 1e-9;
        endpoint_ok &= seg.velocity(0.0).norm() <= 1e-9;
        accel_ok &= seg.accel.x.abs() <= 1.0 + 1e-12 && seg.accel.y.abs() <= 1.0 + 1e-12;
    }
    let pass = c1 && c2 && endpoint_ok && accel_ok;
    report(
        "criterion 7 (bang-bang transform checks)",
        pass,
        &format!("formula cases {c1}/{c2}, endpoints {endpoint_ok}, accel bound {accel_ok}"),
    );
}

/// Criterion 8: the full-scale protocol (50 instances, 5-minute limit,
/// standard parameters) is not reproduced in CI; it is pinned as a preset
/// that the `bench` command can run manually.
#[test]
fn criterion_8_protocol_preset() {
    let mut ok = true;
    for env in EnvKind::ALL {
        for planner in [PlannerKind::SiCpp, PlannerKind::SiCcbs] {
            let c = BenchConfig::paper_protocol(env, 160, planner);
            ok &= c.n_instances == 50
                && c.time_limit == 300.0
                && c.params.iteration == 1500
                && c.params.lambda == 0.1
                && c.params.d_max == 5.0
                && c.params.v_max == 0.5
                && !c.kinodynamic;
        }
    }
    report(
        "criterion 8 (full-scale protocol preset)",
        ok,
        "paper_protocol pins 50 instances, 300 s limit, lambda 0.1, d_max 5 m, 1500 iterations, v_max 0.5 m/s",
    );
}
