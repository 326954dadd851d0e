//! Trajectory-tracking control: nonlinear PD with error-dependent gain
//! schedules, its constant-gain PD specialization, the circular ship
//! reference, and a Lyapunov-value diagnostic for the closed loop.
//!
//! Per axis the scheduled gain is `a |e|^(mu-1)` once the error magnitude
//! reaches the breakpoint `b`, and saturates at `a b^(mu-1)` below it, which
//! removes the singularity at zero error and keeps the gain continuous at
//! the breakpoint. With `mu = 1` every branch collapses to the constant `a`
//! and the controller reduces to plain PD.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vehicle::{rotation, world_frame_terms, wrap_angle, AuvParams, AuvState, Wrench};

/// Proportional and velocity gain schedule for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxisGains {
    /// Proportional gain magnitude.
    pub a_p: f64,
    /// Proportional error breakpoint.
    pub b_p: f64,
    /// Proportional exponent in [0, 1].
    pub mu_p: f64,
    /// Velocity gain magnitude.
    pub a_v: f64,
    /// Velocity error breakpoint.
    pub b_v: f64,
    /// Velocity exponent in [0, 1].
    pub mu_v: f64,
}

impl AxisGains {
    /// Constant gains: the PD specialization.
    pub fn constant(kp: f64, kv: f64) -> Self {
        Self {
            a_p: kp,
            b_p: 1.0,
            mu_p: 1.0,
            a_v: kv,
            b_v: 1.0,
            mu_v: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a, b, mu) in [
            ("p", self.a_p, self.b_p, self.mu_p),
            ("v", self.a_v, self.b_v, self.mu_v),
        ] {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "gain magnitude a_{name} must be > 0"
                )));
            }
            if !(b > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "gain breakpoint b_{name} must be > 0"
                )));
            }
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::InvalidParameter(format!(
                    "gain exponent mu_{name} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Translational-axis default tuning. The square-root force law lets the
/// proportional magnitude sit well above the PD gain without the force
/// blowup a linear gain of that stiffness would have: the restoring force is
/// `900 sqrt(|e|)` beyond the breakpoint, and the small-error stiffness
/// saturates at `900 / sqrt(0.05) ≈ 4000`. Yaw keeps constant gains
/// (`mu = 1`), where nonlinear shaping buys nothing.
impl Default for AxisGains {
    fn default() -> Self {
        Self {
            a_p: 900.0,
            b_p: 0.05,
            mu_p: 0.5,
            a_v: 300.0,
            b_v: 0.05,
            mu_v: 0.5,
        }
    }
}

/// Per-axis gain schedules for the x, y, and yaw axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainSchedule {
    pub x: AxisGains,
    pub y: AxisGains,
    pub yaw: AxisGains,
}

impl Default for GainSchedule {
    fn default() -> Self {
        Self {
            x: AxisGains::default(),
            y: AxisGains::default(),
            yaw: AxisGains::constant(300.0, 250.0),
        }
    }
}

impl GainSchedule {
    /// The same constant gains on every axis: exactly the PD controller.
    pub fn constant(kp: f64, kv: f64) -> Self {
        Self {
            x: AxisGains::constant(kp, kv),
            y: AxisGains::constant(kp, kv),
            yaw: AxisGains::constant(kp, kv),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        self.yaw.validate()
    }

    fn axis(&self, axis: Axis) -> &AxisGains {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Yaw => &self.yaw,
        }
    }
}

/// Which gain family of the schedule to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainFamily {
    Position,
    Velocity,
}

/// Controlled axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Yaw,
}

fn scheduled_gain(a: f64, b: f64, mu: f64, error: f64) -> f64 {
    let e = error.abs();
    if e >= b {
        a * e.powf(mu - 1.0)
    } else {
        a * b.powf(mu - 1.0)
    }
}

/// Evaluate one scheduled gain at the given error value. Always positive and
/// continuous across the breakpoint.
pub fn gain(family: GainFamily, axis: Axis, error: f64, schedule: &GainSchedule) -> f64 {
    let g = schedule.axis(axis);
    match family {
        GainFamily::Position => scheduled_gain(g.a_p, g.b_p, g.mu_p, error),
        GainFamily::Velocity => scheduled_gain(g.a_v, g.b_v, g.mu_v, error),
    }
}

/// Reference pose with analytic first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceState {
    pub eta_ref: Vector3<f64>,
    pub eta_ref_dot: Vector3<f64>,
    pub eta_ref_ddot: Vector3<f64>,
}

/// Circular surface-ship trajectory:
/// `(10 sin 0.1t, 10 sin(0.1t + pi/2), (pi/2) sin 0.1t)`.
pub fn ship_reference(t: f64) -> ReferenceState {
    const OMEGA: f64 = 0.1;
    const RADIUS: f64 = 10.0;
    const YAW_AMPLITUDE: f64 = std::f64::consts::FRAC_PI_2;
    let phase = OMEGA * t;
    let (s, c) = phase.sin_cos();
    ReferenceState {
        eta_ref: Vector3::new(RADIUS * s, RADIUS * c, YAW_AMPLITUDE * s),
        eta_ref_dot: Vector3::new(
            RADIUS * OMEGA * c,
            -RADIUS * OMEGA * s,
            YAW_AMPLITUDE * OMEGA * c,
        ),
        eta_ref_ddot: Vector3::new(
            -RADIUS * OMEGA * OMEGA * s,
            -RADIUS * OMEGA * OMEGA * c,
            -YAW_AMPLITUDE * OMEGA * OMEGA * s,
        ),
    }
}

/// Pose and world-frame velocity error of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingError {
    /// `eta_ref - eta`, yaw component wrapped to (-pi, pi].
    pub eta_tilde: Vector3<f64>,
    /// `eta_ref_dot - R(rho) nu`: velocity error expressed in the world frame.
    pub nu_tilde: Vector3<f64>,
}

/// Compute the tracking error of `state` against `reference`.
pub fn tracking_error(state: &AuvState, reference: &ReferenceState) -> TrackingError {
    let raw = reference.eta_ref - state.eta;
    let eta_tilde = Vector3::new(raw.x, raw.y, wrap_angle(raw.z));
    let nu_tilde = reference.eta_ref_dot - rotation(state.eta.z) * state.nu;
    TrackingError {
        eta_tilde,
        nu_tilde,
    }
}

fn feedback_tau(
    state: &AuvState,
    reference: &ReferenceState,
    params: &AuvParams,
    schedule: &GainSchedule,
) -> Wrench {
    let terms = world_frame_terms(state, params);
    let err = tracking_error(state, reference);
    let kp = Matrix3::from_diagonal(&Vector3::new(
        gain(GainFamily::Position, Axis::X, err.eta_tilde.x, schedule),
        gain(GainFamily::Position, Axis::Y, err.eta_tilde.y, schedule),
        gain(GainFamily::Position, Axis::Yaw, err.eta_tilde.z, schedule),
    ));
    let kv = Matrix3::from_diagonal(&Vector3::new(
        gain(GainFamily::Velocity, Axis::X, err.nu_tilde.x, schedule),
        gain(GainFamily::Velocity, Axis::Y, err.nu_tilde.y, schedule),
        gain(GainFamily::Velocity, Axis::Yaw, err.nu_tilde.z, schedule),
    ));
    let world = terms.inertia * reference.eta_ref_ddot
        + terms.coriolis * reference.eta_ref_dot
        + terms.damping * reference.eta_ref_dot
        + kp * err.eta_tilde
        + kv * err.nu_tilde;
    Wrench::from_vector(&(rotation(state.eta.z).transpose() * world))
}

/// Nonlinear PD control law: feedforward along the reference plus scheduled
/// proportional and velocity feedback, mapped back to a body-frame wrench.
pub fn nlpd_tau(
    state: &AuvState,
    reference: &ReferenceState,
    params: &AuvParams,
    schedule: &GainSchedule,
) -> Wrench {
    feedback_tau(state, reference, params, schedule)
}

/// PD control law: the `mu = 1` specialization with constant diagonal gains.
pub fn pd_tau(
    state: &AuvState,
    reference: &ReferenceState,
    params: &AuvParams,
    kp: f64,
    kv: f64,
) -> Wrench {
    feedback_tau(state, reference, params, &GainSchedule::constant(kp, kv))
}

/// Closed-form potential of one axis: the integral of `zeta * k_p(zeta)`
/// from 0 to `x` over the two gain branches.
fn position_potential(a: f64, b: f64, mu: f64, x: f64) -> f64 {
    let e = x.abs();
    if e <= b {
        0.5 * a * b.powf(mu - 1.0) * x * x
    } else {
        a * (0.5 * b.powf(mu + 1.0) + (e.powf(mu + 1.0) - b.powf(mu + 1.0)) / (mu + 1.0))
    }
}

/// Lyapunov value of the tracking error:
/// `V = 1/2 nu_tilde^T M(eta) nu_tilde + sum_j int_0^eta_tilde_j zeta k_pj(zeta) dzeta`.
///
/// Nonnegative, and zero exactly at zero error. Along the nominal
/// disturbance-free closed loop this value is non-increasing.
pub fn lyapunov_value(
    error: &TrackingError,
    state: &AuvState,
    params: &AuvParams,
    schedule: &GainSchedule,
) -> f64 {
    let inertia = world_frame_terms(state, params).inertia;
    let kinetic = 0.5 * error.nu_tilde.dot(&(inertia * error.nu_tilde));
    let potential = position_potential(
        schedule.x.a_p,
        schedule.x.b_p,
        schedule.x.mu_p,
        error.eta_tilde.x,
    ) + position_potential(
        schedule.y.a_p,
        schedule.y.b_p,
        schedule.y.mu_p,
        error.eta_tilde.y,
    ) + position_potential(
        schedule.yaw.a_p,
        schedule.yaw.b_p,
        schedule.yaw.mu_p,
        error.eta_tilde.z,
    );
    kinetic + potential
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gain_is_constant_for_mu_one() {
        let schedule = GainSchedule::constant(300.0, 250.0);
        for e in [-7.3, -1.0, -0.2, 0.0, 0.4, 1.0, 9.9] {
            assert_eq!(gain(GainFamily::Position, Axis::X, e, &schedule), 300.0);
            assert_eq!(gain(GainFamily::Velocity, Axis::Y, e, &schedule), 250.0);
        }
    }

    #[test]
    fn gain_power_branch_value() {
        let mut schedule = GainSchedule::default();
        schedule.x = AxisGains {
            a_p: 300.0,
            b_p: 1.0,
            mu_p: 0.5,
            ..schedule.x
        };
        assert_relative_eq!(
            gain(GainFamily::Position, Axis::X, 4.0, &schedule),
            150.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gain_saturates_at_zero_error() {
        let mut schedule = GainSchedule::default();
        schedule.x = AxisGains {
            a_p: 300.0,
            b_p: 1.0,
            mu_p: 0.5,
            ..schedule.x
        };
        assert_relative_eq!(
            gain(GainFamily::Position, Axis::X, 0.0, &schedule),
            300.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gain_continuous_at_breakpoint() {
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let b = 0.37;
            let below = scheduled_gain(220.0, b, mu, b - 1e-15);
            let at = scheduled_gain(220.0, b, mu, b);
            assert!((below - at).abs() <= 1e-12 * at.abs());
        }
    }

    #[test]
    fn gain_monotone_above_breakpoint() {
        let (a, b, mu) = (300.0, 0.5, 0.4);
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let e = b + i as f64 * 0.1;
            let k = scheduled_gain(a, b, mu, e);
            assert!(k <= prev);
            prev = k;
        }
    }

    #[test]
    fn ship_reference_spot_values() {
        let r0 = ship_reference(0.0);
        assert_relative_eq!(r0.eta_ref.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(r0.eta_ref.y, 10.0, epsilon = 1e-12);
        assert_relative_eq!(r0.eta_ref.z, 0.0, epsilon = 1e-15);
        let quarter = ship_reference(5.0 * std::f64::consts::PI);
        assert_relative_eq!(quarter.eta_ref.x, 10.0, epsilon = 1e-12);
        assert_relative_eq!(quarter.eta_ref.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ship_reference_stays_on_circle() {
        for i in 0..200 {
            let r = ship_reference(i as f64 * 0.75);
            let radius2 = r.eta_ref.x * r.eta_ref.x + r.eta_ref.y * r.eta_ref.y;
            assert_relative_eq!(radius2, 100.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn ship_reference_derivatives_consistent() {
        // Central finite differences of the pose match the analytic rates.
        let h = 1e-5;
        for i in 1..50 {
            let t = i as f64 * 1.3;
            let r = ship_reference(t);
            let plus = ship_reference(t + h);
            let minus = ship_reference(t - h);
            let fd_dot = (plus.eta_ref - minus.eta_ref) / (2.0 * h);
            let fd_ddot = (plus.eta_ref_dot - minus.eta_ref_dot) / (2.0 * h);
            assert!((fd_dot - r.eta_ref_dot).norm() < 1e-8);
            assert!((fd_ddot - r.eta_ref_ddot).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_reference_zero_state_gives_zero_tau() {
        let state = AuvState::at_rest(Vector3::zeros());
        let reference = ReferenceState {
            eta_ref: Vector3::zeros(),
            eta_ref_dot: Vector3::zeros(),
            eta_ref_ddot: Vector3::zeros(),
        };
        let tau = pd_tau(&state, &reference, &AuvParams::default(), 300.0, 250.0);
        assert_eq!(tau, Wrench::ZERO);
    }

    #[test]
    fn perfect_tracking_reduces_to_feedforward() {
        // Straight constant-velocity reference at zero heading: feedback
        // vanishes and the wrench is the damping feedforward plus the
        // Coriolis coupling on the reference velocity.
        let params = AuvParams::default();
        let velocity = Vector3::new(0.8, 0.0, 0.0);
        let state = AuvState::new(Vector3::new(2.0, -1.0, 0.0), velocity);
        let reference = ReferenceState {
            eta_ref: state.eta,
            eta_ref_dot: velocity,
            eta_ref_ddot: Vector3::zeros(),
        };
        let tau = pd_tau(&state, &reference, &params, 300.0, 250.0);
        let expected = crate::vehicle::damping_matrix(&velocity, &params) * velocity
            + crate::vehicle::coriolis_matrix(&velocity, &params) * velocity;
        assert_relative_eq!(tau.surge, expected.x, epsilon = 1e-12);
        assert_relative_eq!(tau.sway, expected.y, epsilon = 1e-12);
        assert_relative_eq!(tau.yaw, expected.z, epsilon = 1e-12);
    }

    #[test]
    fn nlpd_with_unit_mu_equals_pd_bitwise() {
        let params = AuvParams::default();
        let schedule = GainSchedule::constant(300.0, 250.0);
        for i in 0..100 {
            let t = i as f64 * 0.31;
            let state = AuvState::new(
                Vector3::new((t * 0.9).sin() * 6.0, (t * 0.7).cos() * 6.0, (t * 0.5).sin()),
                Vector3::new((t * 1.1).cos(), (t * 1.3).sin() * 0.5, (t * 0.3).cos() * 0.4),
            );
            let reference = ship_reference(t);
            let a = nlpd_tau(&state, &reference, &params, &schedule);
            let b = pd_tau(&state, &reference, &params, 300.0, 250.0);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn doubling_position_error_adds_proportional_term() {
        // With constant gains the feedback is linear in eta_tilde, so the
        // change in tau from moving the reference is R^T kp d(eta_tilde).
        let params = AuvParams::default();
        let state = AuvState::new(Vector3::new(1.0, 2.0, 0.6), Vector3::new(0.3, -0.1, 0.2));
        let base = ship_reference(3.0);
        let shift = Vector3::new(0.4, -0.7, 0.0);
        let shifted = ReferenceState {
            eta_ref: base.eta_ref + shift,
            ..base
        };
        let kp = 300.0;
        let t0 = pd_tau(&state, &base, &params, kp, 250.0).as_vector();
        let t1 = pd_tau(&state, &shifted, &params, kp, 250.0).as_vector();
        let expected = rotation(state.eta.z).transpose() * (kp * shift);
        assert_relative_eq!((t1 - t0 - expected).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn yaw_error_wraps_across_pi() {
        let state = AuvState::at_rest(Vector3::new(0.0, 0.0, 3.0));
        let reference = ReferenceState {
            eta_ref: Vector3::new(0.0, 0.0, -3.0),
            eta_ref_dot: Vector3::zeros(),
            eta_ref_ddot: Vector3::zeros(),
        };
        let err = tracking_error(&state, &reference);
        // The short way round from 3.0 to -3.0 rad crosses pi.
        assert_relative_eq!(
            err.eta_tilde.z,
            2.0 * std::f64::consts::PI - 6.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn lyapunov_zero_at_zero_error() {
        let state = AuvState::at_rest(Vector3::new(1.0, 1.0, 0.3));
        let err = TrackingError {
            eta_tilde: Vector3::zeros(),
            nu_tilde: Vector3::zeros(),
        };
        assert_eq!(
            lyapunov_value(&err, &state, &AuvParams::default(), &GainSchedule::default()),
            0.0
        );
    }

    #[test]
    fn lyapunov_quadratic_for_unit_mu() {
        let state = AuvState::at_rest(Vector3::zeros());
        let schedule = GainSchedule::constant(300.0, 250.0);
        let err = TrackingError {
            eta_tilde: Vector3::new(0.7, -1.1, 0.2),
            nu_tilde: Vector3::zeros(),
        };
        let v = lyapunov_value(&err, &state, &AuvParams::default(), &schedule);
        assert_relative_eq!(
            v,
            0.5 * 300.0 * err.eta_tilde.norm_squared(),
            epsilon = 1e-9
        );
    }

    /// Adaptive Simpson quadrature used as an independent check of the
    /// closed-form potential.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn recurse(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let mid = 0.5 * (a + b);
            let left = simpson(f, a, mid);
            let right = simpson(f, mid, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, mid, left, 0.5 * tol, depth - 1)
                    + recurse(f, mid, b, right, 0.5 * tol, depth - 1)
            }
        }
        recurse(f, lo, hi, simpson(f, lo, hi), tol, 40)
    }

    fn potential_by_quadrature(a: f64, b: f64, mu: f64, x: f64) -> f64 {
        let f = |zeta: f64| zeta * scheduled_gain(a, b, mu, zeta);
        let e = x.abs();
        // Split at the breakpoint so each piece is smooth.
        if e <= b {
            adaptive_simpson(&f, 0.0, e, 1e-13)
        } else {
            adaptive_simpson(&f, 0.0, b, 1e-13) + adaptive_simpson(&f, b, e, 1e-13)
        }
    }

    #[test]
    fn potential_matches_quadrature() {
        // Deterministic sweep over 50 (a, b, mu, x) combinations.
        let mut k = 0u32;
        for i in 0..50 {
            let a = 50.0 + 17.0 * (i % 7) as f64;
            let b = 0.05 + 0.3 * (i % 5) as f64;
            let mu = (i % 11) as f64 / 10.0;
            let x = -4.0 + 8.0 * (i as f64 * 0.617).fract();
            let closed = position_potential(a, b, mu, x);
            let quad = potential_by_quadrature(a, b, mu, x);
            let scale = quad.abs().max(1e-12);
            assert!(
                (closed - quad).abs() <= 1e-9 * scale,
                "mismatch at a={a} b={b} mu={mu} x={x}: closed {closed} quad {quad}"
            );
            k += 1;
        }
        assert_eq!(k, 50);
    }

    proptest! {
        #[test]
        fn prop_gain_positive_and_continuous(
            a in 1.0f64..1000.0,
            b in 0.01f64..5.0,
            mu in 0.0f64..1.0,
            e in -20.0f64..20.0,
        ) {
            let k = scheduled_gain(a, b, mu, e);
            prop_assert!(k > 0.0);
            let at_break = scheduled_gain(a, b, mu, b);
            let just_below = scheduled_gain(a, b, mu, b * (1.0 - 1e-12));
            prop_assert!((at_break - just_below).abs() <= 1e-9 * at_break);
        }

        #[test]
        fn prop_feedback_is_odd(
            ex in -3.0f64..3.0,
            ey in -3.0f64..3.0,
            vx in -2.0f64..2.0,
            vy in -2.0f64..2.0,
        ) {
            // With zero reference rates the feedforward vanishes, so tau is
            // the pure feedback R^T [Kp eta_tilde + Kv nu_tilde]. Since
            // k(|e|) e is odd, negating both errors negates tau.
            let params = AuvParams::default();
            let schedule = GainSchedule::default();
            let make_ref = |sx: f64, sy: f64| ReferenceState {
                eta_ref: Vector3::new(sx, sy, 0.0),
                eta_ref_dot: Vector3::zeros(),
                eta_ref_ddot: Vector3::zeros(),
            };
            let plus_state = AuvState::new(Vector3::zeros(), Vector3::new(-vx, -vy, 0.0));
            let minus_state = AuvState::new(Vector3::zeros(), Vector3::new(vx, vy, 0.0));
            let tau_plus =
                nlpd_tau(&plus_state, &make_ref(ex, ey), &params, &schedule).as_vector();
            let tau_minus =
                nlpd_tau(&minus_state, &make_ref(-ex, -ey), &params, &schedule).as_vector();
            prop_assert!((tau_plus + tau_minus).norm() < 1e-9);
        }
    }
}
