//! Earliest arrival time over an edge among moving obstacles.
//!
//! The robot waits at `from_q` during `[t_ready, depart_deadline)`, then
//! moves at constant speed to `to_q`, and must arrive inside the target
//! safe interval. The exact solver enumerates candidate departure times:
//! the window start plus the upper endpoints of every obstacle's
//! blocked-departure intervals. Transit feasibility as a function of the
//! departure time is piecewise quadratic because both motions are
//! piecewise linear, so those endpoints are quadratic roots. A
//! departure-time sweep with bisection refinement is kept as the fallback
//! and serves as the oracle in tests.

use super::{DynamicEnvironment, SafeInterval};
use crate::geometry::{euclid, seg_seg_dist, MovingDiscSegment, Point2, Vec2};

/// Slack applied to squared-distance transit checks so that departures at
/// exact tangency roots are accepted (tangency is collision-free).
const TANGENCY_EPS_SQ: f64 = 1e-9;

/// Relative velocities with squared norm below this are treated as equal.
const VEL_EPS_SQ: f64 = 1e-18;

/// Half-open `[lo, hi)` emptiness; NaN bounds count as empty.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub(crate) fn window_empty(lo: f64, hi: f64) -> bool {
    !(lo < hi)
}

/// Earliest arrival at `to_q` within `target`, departing from `from_q`
/// not before `t_ready` and strictly before `depart_deadline`, moving at
/// `v_max` without colliding with any obstacle in `env`. `None` means no
/// feasible departure exists. Accurate to well under 1e-3 s.
#[allow(clippy::too_many_arguments)]
pub fn earliest_arrival(
    from_q: Point2,
    t_ready: f64,
    depart_deadline: f64,
    to_q: Point2,
    target: &SafeInterval,
    r: f64,
    v_max: f64,
    env: &DynamicEnvironment,
) -> Option<f64> {
    debug_assert!(v_max > 0.0);
    let dist = euclid(from_q, to_q);
    let travel = dist / v_max;
    let dep_lo = t_ready.max(target.low - travel);
    let dep_hi = depart_deadline.min(target.high - travel);
    if window_empty(dep_lo, dep_hi) {
        return None;
    }
    if dist == 0.0 {
        // Instantaneous transit: the window membership is all that matters.
        return Some(dep_lo + travel);
    }
    let v_r = from_q.to(to_q).scaled(v_max / dist);

    let mut cands: Vec<f64> = vec![dep_lo];
    for seg in env.segments_near(from_q, to_q, r) {
        let rho = r + seg.radius;
        if seg_seg_dist(from_q, to_q, seg.p_start, seg.p_end) >= rho {
            continue;
        }
        for (_, b) in blocked_departures(from_q, v_r, travel, seg, rho) {
            if b > dep_lo && b < dep_hi && b.is_finite() {
                cands.push(b);
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    for &t_dep in &cands {
        if transit_free(from_q, v_r, travel, t_dep, r, env) {
            return Some(t_dep + travel);
        }
    }
    None
}

/// Whether the transit departing at `t_dep` clears every obstacle.
pub(crate) fn transit_free(
    p0: Point2,
    v_r: Vec2,
    travel: f64,
    t_dep: f64,
    r: f64,
    env: &DynamicEnvironment,
) -> bool {
    let p1 = p0.offset(v_r.scaled(travel));
    for seg in env.segments_near(p0, p1, r) {
        let rho = r + seg.radius;
        if transit_hits_segment(p0, v_r, travel, t_dep, seg, rho) {
            return false;
        }
    }
    true
}

fn transit_hits_segment(
    p0: Point2,
    v_r: Vec2,
    travel: f64,
    t_dep: f64,
    seg: &MovingDiscSegment,
    rho: f64,
) -> bool {
    let t0 = t_dep.max(seg.t_start);
    let t1 = (t_dep + travel).min(seg.t_end);
    if t0 > t1 {
        return false;
    }
    let robot0 = p0.offset(v_r.scaled(t0 - t_dep));
    let rel0 = seg.position(t0).to(robot0);
    let relv = v_r - seg.velocity();
    let rel1 = rel0 + relv.scaled(t1 - t0);
    // Minimum separation over the window = distance from the origin to the
    // relative-motion segment.
    let d = crate::geometry::seg_point_dist(
        Point2::new(rel0.x, rel0.y),
        Point2::new(rel1.x, rel1.y),
        Point2::new(0.0, 0.0),
    );
    d * d < rho * rho - TANGENCY_EPS_SQ
}

/// Blocked-departure intervals for one obstacle segment, in absolute
/// departure time. Computed in the shifted variable `x = t_dep - s0` for
/// conditioning; within each elementary piece of the x-axis the minimum
/// transit separation is an explicit quadratic in x.
fn blocked_departures(
    p0: Point2,
    v_r: Vec2,
    travel: f64,
    seg: &MovingDiscSegment,
    rho: f64,
) -> Vec<(f64, f64)> {
    let s0 = seg.t_start;
    let span = seg.t_end - s0; // may be INFINITY (stationary hold)
    let w = seg.velocity();
    let k = seg.p_start.to(p0); // p0 - o0
    let beta = v_r - w;
    let beta_sq = beta.norm_sq();

    // Piece breakpoints over x in [-travel, span].
    let x_min = -travel;
    let x_max = span;
    let mut bps: Vec<f64> = vec![x_min];
    if x_max.is_finite() {
        bps.push(x_max);
    }
    for cand in [0.0, span - travel] {
        if cand.is_finite() && cand > x_min && cand < x_max {
            bps.push(cand);
        }
    }
    if beta_sq >= VEL_EPS_SQ {
        // Roots of tau*(x) = each window boundary; tau* is affine in x.
        let u0 = -k.dot(beta) / beta_sq;
        let u1 = w.dot(beta) / beta_sq;
        let mut push_root = |num: f64, den: f64| {
            if den.abs() > 1e-12 {
                let x = num / den;
                if x.is_finite() && x > x_min && x < x_max {
                    bps.push(x);
                }
            }
        };
        push_root(-u0, u1); // tau* = 0
        push_root(travel - u0, u1); // tau* = travel
        push_root(-u0, u1 + 1.0); // tau* = -x
        if span.is_finite() {
            push_root(span - u0, u1 + 1.0); // tau* = span - x
        }
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut blocked: Vec<(f64, f64)> = Vec::new();
    let n = bps.len();
    for i in 0..n {
        let xa = bps[i];
        let xb = if i + 1 < n { bps[i + 1] } else { x_max };
        if xb <= xa {
            continue;
        }
        let mid = if xb.is_finite() {
            0.5 * (xa + xb)
        } else {
            xa + 1.0
        };
        // Window at the midpoint.
        let lo = (-mid).max(0.0);
        let hi = travel.min(span - mid);
        if lo > hi {
            continue;
        }
        // Quadratic coefficients of min-separation-squared on this piece.
        let (a2, a1, a0) = if beta_sq < VEL_EPS_SQ {
            quad_norm(k, w.scaled(-1.0))
        } else {
            let tau_star = (-k.dot(beta) + w.dot(beta) * mid) / beta_sq;
            if tau_star < lo {
                if mid >= 0.0 {
                    quad_norm(k, w.scaled(-1.0)) // tau = 0
                } else {
                    quad_norm(k, v_r.scaled(-1.0)) // tau = -x
                }
            } else if tau_star > hi {
                if hi == travel {
                    quad_norm(k + beta.scaled(travel), w.scaled(-1.0)) // tau = travel
                } else {
                    quad_norm(k + beta.scaled(span), v_r.scaled(-1.0)) // tau = span - x
                }
            } else {
                // Interior minimizer.
                let kb = k.dot(beta);
                let wb = w.dot(beta);
                (
                    w.norm_sq() - wb * wb / beta_sq,
                    -2.0 * k.dot(w) + 2.0 * kb * wb / beta_sq,
                    k.norm_sq() - kb * kb / beta_sq,
                )
            }
        };
        if let Some((ra, rb)) = quad_below(a2, a1, a0 - rho * rho, xa, xb) {
            blocked.push((ra, rb));
        }
    }

    // Fuse across piece boundaries and shift back to absolute time.
    crate::geometry::merge_intervals(&mut blocked, 1e-9);
    for iv in &mut blocked {
        iv.0 += s0;
        iv.1 += s0;
    }
    blocked
}

/// Coefficients of `|m + n*x|^2` as a quadratic in x.
fn quad_norm(m: Vec2, n: Vec2) -> (f64, f64, f64) {
    (n.norm_sq(), 2.0 * m.dot(n), m.norm_sq())
}

/// Solution interval of `a2 x^2 + a1 x + c < 0` clipped to `[xa, xb]`.
fn quad_below(a2: f64, a1: f64, c: f64, xa: f64, xb: f64) -> Option<(f64, f64)> {
    let clip = |lo: f64, hi: f64| {
        let lo = lo.max(xa);
        let hi = hi.min(xb);
        if lo < hi {
            Some((lo, hi))
        } else {
            None
        }
    };
    if a2.abs() < 1e-15 {
        if a1.abs() < 1e-15 {
            return if c < 0.0 { clip(xa, xb) } else { None };
        }
        let root = -c / a1;
        return if a1 > 0.0 {
            clip(f64::NEG_INFINITY, root)
        } else {
            clip(root, f64::INFINITY)
        };
    }
    // Min-separation quadratics open upward; guard anyway.
    let disc = a1 * a1 - 4.0 * a2 * c;
    if a2 > 0.0 {
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let q = -0.5 * (a1 + a1.signum() * sq);
        let (r1, r2) = (q / a2, c / q);
        clip(r1.min(r2), r1.max(r2))
    } else if disc <= 0.0 {
        clip(xa, xb)
    } else {
        let sq = disc.sqrt();
        let q = -0.5 * (a1 + a1.signum() * sq);
        let (r1, r2) = (q / a2, c / q);
        // Below zero outside the roots; prefer the earlier ray.
        clip(f64::NEG_INFINITY, r1.min(r2)).or_else(|| clip(r1.max(r2), f64::INFINITY))
    }
}

/// Departure-time sweep with bisection refinement: the mandated fallback
/// for non-linear edge motions and the reference behavior for tests.
/// `feasible(t_dep)` must be the exact transit check at that departure.
pub(crate) fn sweep_departures(
    dep_lo: f64,
    dep_hi: f64,
    delta: f64,
    quiet_cap: f64,
    feasible: impl Fn(f64) -> bool,
) -> Option<f64> {
    let cap = dep_hi.min(quiet_cap);
    if window_empty(dep_lo, dep_hi) {
        return None;
    }
    if feasible(dep_lo) {
        return Some(dep_lo);
    }
    let mut prev = dep_lo;
    let mut k: u64 = 1;
    loop {
        let t = dep_lo + k as f64 * delta;
        if t >= cap {
            break;
        }
        if feasible(t) {
            return Some(refine(prev, t, &feasible));
        }
        prev = t;
        k += 1;
    }
    // Beyond the quiet cap feasibility is time-invariant; test once.
    if quiet_cap < dep_hi && feasible(quiet_cap) {
        return Some(refine(prev, quiet_cap, &feasible));
    }
    None
}

fn refine(mut infeasible: f64, mut feasible_t: f64, feasible: &impl Fn(f64) -> bool) -> f64 {
    for _ in 0..40 {
        let mid = 0.5 * (infeasible + feasible_t);
        if feasible(mid) {
            feasible_t = mid;
        } else {
            infeasible = mid;
        }
    }
    feasible_t
}

/// Sweep-based earliest arrival for a constant-velocity edge; same contract
/// as [`earliest_arrival`] with accuracy bounded by `delta`-grid bisection.
#[allow(clippy::too_many_arguments)]
pub fn earliest_arrival_sweep(
    from_q: Point2,
    t_ready: f64,
    depart_deadline: f64,
    to_q: Point2,
    target: &SafeInterval,
    r: f64,
    v_max: f64,
    env: &DynamicEnvironment,
    delta: f64,
) -> Option<f64> {
    let dist = euclid(from_q, to_q);
    let travel = dist / v_max;
    let dep_lo = t_ready.max(target.low - travel);
    let dep_hi = depart_deadline.min(target.high - travel);
    if window_empty(dep_lo, dep_hi) {
        return None;
    }
    if dist == 0.0 {
        return Some(dep_lo + travel);
    }
    let v_r = from_q.to(to_q).scaled(v_max / dist);
    let quiet = quiet_time(env) + travel + delta;
    sweep_departures(dep_lo, dep_hi, delta, quiet.max(dep_lo + delta), |t| {
        transit_free(from_q, v_r, travel, t, r, env)
    })
    .map(|t| t + travel)
}

/// Time after which every obstacle is parked (max finite segment end).
pub(crate) fn quiet_time(env: &DynamicEnvironment) -> f64 {
    env.moving()
        .iter()
        .map(|s| if s.t_end.is_finite() { s.t_end } else { s.t_start })
        .fold(0.0, f64::max)
}
