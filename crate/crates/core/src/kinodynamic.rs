//! Bang-bang local planner: acceleration-bounded point-to-point motion
//! with zero boundary velocities. The per-axis acceleration is scaled so
//! the dominant axis saturates at `a_max`; a cruise phase is inserted only
//! when the triangular profile would exceed the velocity cap.

use crate::geometry::{euclid, Point2, Vec2};
use crate::safe_interval::{DynamicEnvironment, SafeInterval};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BangBangParams {
    pub a_max: f64,
    pub v_cap: f64,
}

impl Default for BangBangParams {
    fn default() -> Self {
        Self {
            a_max: 1.0,
            v_cap: f64::INFINITY,
        }
    }
}

impl BangBangParams {
    pub fn with_cap(v_cap: f64) -> Self {
        Self { a_max: 1.0, v_cap }
    }
}

/// Accelerate-(cruise)-decelerate motion between two rest states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinodynamicSegment {
    pub q_from: Point2,
    pub q_to: Point2,
    pub accel: Vec2,
    pub t_accel: f64,
    pub t_cruise: f64,
    pub t_decel: f64,
}

impl KinodynamicSegment {
    pub fn duration(&self) -> f64 {
        self.t_accel + self.t_cruise + self.t_decel
    }

    /// Velocity at the end of the acceleration phase.
    fn peak_velocity(&self) -> Vec2 {
        self.accel.scaled(self.t_accel)
    }

    /// Position at local time `tau` in `[0, duration]`, clamped outside.
    pub fn position(&self, tau: f64) -> Point2 {
        let ta = self.t_accel;
        let tc = self.t_cruise;
        let tau = tau.clamp(0.0, self.duration());
        let vp = self.peak_velocity();
        if tau <= ta {
            return self.q_from.offset(self.accel.scaled(0.5 * tau * tau));
        }
        let after_accel = self.q_from.offset(self.accel.scaled(0.5 * ta * ta));
        if tau <= ta + tc {
            return after_accel.offset(vp.scaled(tau - ta));
        }
        let after_cruise = after_accel.offset(vp.scaled(tc));
        let td = tau - ta - tc;
        after_cruise.offset(vp.scaled(td) - self.accel.scaled(0.5 * td * td))
    }

    /// Velocity at local time `tau`; zero outside the motion.
    pub fn velocity(&self, tau: f64) -> Vec2 {
        let ta = self.t_accel;
        let tc = self.t_cruise;
        if tau < 0.0 || tau > self.duration() {
            return Vec2::ZERO;
        }
        if tau <= ta {
            self.accel.scaled(tau)
        } else if tau <= ta + tc {
            self.peak_velocity()
        } else {
            let td = tau - ta - tc;
            self.peak_velocity() - self.accel.scaled(td)
        }
    }
}

/// Time-optimal rest-to-rest connection. With no velocity cap the profile
/// is triangular with per-phase time `sqrt(s * |v| / a_max)` where
/// `s = max_k |v_hat_k|`; otherwise it is trapezoidal.
pub fn bang_bang_connect(q: Point2, q_prime: Point2, params: &BangBangParams) -> KinodynamicSegment {
    let v = q.to(q_prime);
    let dist = v.norm();
    if dist == 0.0 {
        return KinodynamicSegment {
            q_from: q,
            q_to: q_prime,
            accel: Vec2::ZERO,
            t_accel: 0.0,
            t_cruise: 0.0,
            t_decel: 0.0,
        };
    }
    let v_hat = v.scaled(1.0 / dist);
    let s = v_hat.x.abs().max(v_hat.y.abs());
    let accel = v_hat.scaled(params.a_max / s);
    let a_mag = accel.norm(); // = a_max / s along the motion direction
    // Triangular profile: distance = a_mag * t^2 with per-phase time t.
    let t_tri = (s * dist / params.a_max).sqrt();
    let peak = a_mag * t_tri;
    if peak <= params.v_cap {
        KinodynamicSegment {
            q_from: q,
            q_to: q_prime,
            accel,
            t_accel: t_tri,
            t_cruise: 0.0,
            t_decel: t_tri,
        }
    } else {
        let t_accel = params.v_cap / a_mag;
        let d_ramps = a_mag * t_accel * t_accel;
        let t_cruise = (dist - d_ramps) / params.v_cap;
        KinodynamicSegment {
            q_from: q,
            q_to: q_prime,
            accel,
            t_accel,
            t_cruise,
            t_decel: t_accel,
        }
    }
}

pub fn bang_bang_arrival_time(q: Point2, q_prime: Point2, params: &BangBangParams) -> f64 {
    bang_bang_connect(q, q_prime, params).duration()
}

/// Transit collision sampling step; the profile is piecewise quadratic so
/// closed-form disc-disc roots do not apply.
pub(crate) const BB_SAMPLE_DT: f64 = 1e-2;

/// Earliest arrival over a bang-bang edge via the departure-time sweep
/// with bisection refinement (delta = 0.01 s).
#[allow(clippy::too_many_arguments)]
pub fn earliest_arrival_bang_bang(
    from_q: Point2,
    t_ready: f64,
    depart_deadline: f64,
    to_q: Point2,
    target: &SafeInterval,
    r: f64,
    params: &BangBangParams,
    env: &DynamicEnvironment,
) -> Option<f64> {
    let seg = bang_bang_connect(from_q, to_q, params);
    let travel = seg.duration();
    let dep_lo = t_ready.max(target.low - travel);
    let dep_hi = depart_deadline.min(target.high - travel);
    if crate::safe_interval::arrival::window_empty(dep_lo, dep_hi) {
        return None;
    }
    if travel == 0.0 {
        return Some(dep_lo);
    }
    let quiet = crate::safe_interval::arrival::quiet_time(env) + travel + 0.01;
    crate::safe_interval::arrival::sweep_departures(
        dep_lo,
        dep_hi,
        0.01,
        quiet.max(dep_lo + 0.01),
        |t_dep| bang_bang_transit_free(&seg, t_dep, r, env),
    )
    .map(|t| t + travel)
}

pub(crate) fn bang_bang_transit_free(
    seg: &KinodynamicSegment,
    t_dep: f64,
    r: f64,
    env: &DynamicEnvironment,
) -> bool {
    let dur = seg.duration();
    let steps = (dur / BB_SAMPLE_DT).ceil().max(1.0) as usize;
    for obs in env.segments_near(seg.q_from, seg.q_to, r) {
        let rho = r + obs.radius;
        if crate::geometry::seg_seg_dist(seg.q_from, seg.q_to, obs.p_start, obs.p_end) >= rho {
            continue;
        }
        if t_dep > obs.t_end || t_dep + dur < obs.t_start {
            continue;
        }
        for i in 0..=steps {
            let tau = dur * i as f64 / steps as f64;
            let t = t_dep + tau;
            if t < obs.t_start || t > obs.t_end {
                continue;
            }
            if euclid(seg.position(tau), obs.position(t)) < rho {
                return false;
            }
        }
    }
    true
}
