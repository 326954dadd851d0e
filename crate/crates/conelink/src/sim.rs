//! Closed-loop scenario runner and communication metrics.
//!
//! One run wires the circular ship reference, a tracking controller, the AUV
//! dynamics, the optical channel, and the connectivity cone into a timed
//! loop at a fixed sampling step. Measurement noise corrupts only the
//! controller's view of the state; external disturbance pulses enter the
//! plant as a body-frame wrench. Runs are fully deterministic given the
//! noise seed.

use nalgebra::Vector3;

use crate::cone::{solve_slant_height, ConeRegion};
use crate::control::{
    lyapunov_value, nlpd_tau, ship_reference, tracking_error, GainSchedule,
};
use crate::error::{Error, Result};
use crate::optics::{bit_rate_for_inverse_q, q_inverse, LinkGeometry, OpticalLink};
use crate::rng::GaussianSource;
use crate::vehicle::{step, wrap_angle, AuvParams, AuvState, Wrench};

/// Cone height the bundled scenarios are built around, m. The default
/// transmitter depth equals this height, which puts the vehicle exactly at
/// the cone floor when it sits directly beneath the ship and reproduces the
/// reference initial separation of about 8.03 m from the (5, 5) start.
pub const REFERENCE_CONE_HEIGHT: f64 = 3.8157;

/// Tracking controller selection.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerKind {
    /// Constant-gain PD law.
    Pd { kp: f64, kv: f64 },
    /// Nonlinear PD with per-axis gain schedules.
    Nlpd { schedule: GainSchedule },
    /// No control input; the vehicle drifts. Useful for isolating the
    /// effect of the controller channel in experiments.
    None,
}

/// A body-frame wrench pulse over the half-open window [start, start + duration).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceSpec {
    pub start: f64,
    pub duration: f64,
    pub wrench: Wrench,
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        Self {
            start: 30.0,
            duration: 1.0,
            wrench: Wrench::new(350.0, 350.0, 350.0),
        }
    }
}

/// Zero-mean Gaussian measurement noise on the controller's state view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation on x and y, m.
    pub sigma_pos: f64,
    /// Standard deviation on the yaw angle, rad.
    pub sigma_yaw: f64,
    /// Standard deviation on the body velocities, m/s (rad/s in yaw).
    pub sigma_vel: f64,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            sigma_pos: 0.02,
            sigma_yaw: 0.005,
            sigma_vel: 0.02,
            seed: 42,
        }
    }
}

/// Everything one closed-loop run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Simulated time span, s.
    pub duration: f64,
    /// Sampling step, s. `duration` must be a whole number of steps.
    pub dt: f64,
    /// Initial world pose; the vehicle starts at rest.
    pub initial_eta: Vector3<f64>,
    /// Fixed transmitter depth below the surface, m.
    pub depth: f64,
    pub controller: ControllerKind,
    pub disturbance: Option<DisturbanceSpec>,
    pub noise: Option<NoiseSpec>,
    /// Inertia multiplier applied to the plant only; the controller keeps
    /// the nominal model.
    pub mass_scale: f64,
    pub auv: AuvParams,
    pub link: OpticalLink,
    /// Target bit error rate of the link evaluation.
    pub target_ber: f64,
    /// Rate the connectivity cone is built for, bit/s.
    pub min_bit_rate: f64,
    /// Explicit cone slant height, m. When absent the slant height is solved
    /// from the channel model at (`target_ber`, `min_bit_rate`).
    pub cone_slant_height: Option<f64>,
    /// Explicit RMSE window; defaults to [established time, duration].
    pub rmse_window: Option<(f64, f64)>,
}

impl Default for Scenario {
    fn default() -> Self {
        let link = OpticalLink::default();
        let slant = REFERENCE_CONE_HEIGHT / link.receiver.fov_half_angle.cos();
        Self {
            name: "nominal-pd".into(),
            duration: 150.0,
            dt: 0.005,
            initial_eta: Vector3::new(5.0, 5.0, 0.0),
            depth: REFERENCE_CONE_HEIGHT,
            controller: ControllerKind::Pd {
                kp: 300.0,
                kv: 250.0,
            },
            disturbance: None,
            noise: None,
            mass_scale: 1.0,
            auv: AuvParams::default(),
            link,
            target_ber: 1e-4,
            min_bit_rate: 1e7,
            cone_slant_height: Some(slant),
            rmse_window: None,
        }
    }
}

impl Scenario {
    /// Number of integration steps (rows minus one).
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::InvalidParameter("duration must be > 0".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be > 0".into()));
        }
        let ratio = self.duration / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "duration/dt = {ratio} is not a whole number of steps"
            )));
        }
        if !(self.depth > 0.0) {
            return Err(Error::InvalidParameter("depth must be > 0".into()));
        }
        if !(self.mass_scale > 0.0) {
            return Err(Error::InvalidParameter("mass_scale must be > 0".into()));
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(Error::InvalidParameter(
                "target_ber must lie in (0, 0.5)".into(),
            ));
        }
        if !(self.min_bit_rate > 0.0) {
            return Err(Error::InvalidParameter("min_bit_rate must be > 0".into()));
        }
        if let Some(slant) = self.cone_slant_height {
            if !(slant > 0.0) {
                return Err(Error::InvalidParameter(
                    "cone_slant_height must be > 0".into(),
                ));
            }
        }
        if let Some(d) = &self.disturbance {
            if !(d.duration >= 0.0) {
                return Err(Error::InvalidParameter(
                    "disturbance.duration must be >= 0".into(),
                ));
            }
        }
        if let Some(n) = &self.noise {
            if !(n.sigma_pos >= 0.0 && n.sigma_yaw >= 0.0 && n.sigma_vel >= 0.0) {
                return Err(Error::InvalidParameter(
                    "noise standard deviations must be >= 0".into(),
                ));
            }
        }
        if let Some((start, end)) = self.rmse_window {
            if !(start >= 0.0 && end <= self.duration && start < end) {
                return Err(Error::InvalidParameter(format!(
                    "rmse_window [{start}, {end}] must lie within [0, {}]",
                    self.duration
                )));
            }
        }
        match &self.controller {
            ControllerKind::Pd { kp, kv } => {
                if !(*kp > 0.0 && *kv > 0.0) {
                    return Err(Error::InvalidParameter("pd gains must be > 0".into()));
                }
            }
            ControllerKind::Nlpd { schedule } => schedule.validate()?,
            ControllerKind::None => {}
        }
        self.auv.validate()?;
        self.link.validate()
    }
}

/// One sampling instant of a run: true state, reference, applied control,
/// link geometry, and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRow {
    pub t: f64,
    /// True world pose; yaw wrapped to (-pi, pi] for reporting.
    pub eta: Vector3<f64>,
    /// True body velocities.
    pub nu: Vector3<f64>,
    pub eta_ref: Vector3<f64>,
    /// Control wrench applied over [t, t + dt).
    pub tau: Wrench,
    /// Transmitter-receiver distance, m.
    pub distance: f64,
    /// Receiver incidence angle, rad.
    pub incidence_angle: f64,
    /// Achievable rate at the scenario's target BER, bit/s.
    pub bit_rate: f64,
    pub inside_cone: bool,
    /// Lyapunov value of the tracking error.
    pub lyapunov: f64,
}

/// Communication metrics over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// First instant inside the cone (t_a), if any.
    pub cone_arrival_time: Option<f64>,
    /// Earliest instant after which the vehicle never leaves the cone (t_b).
    pub established_time: Option<f64>,
    /// Exit-to-permanent-re-entry span after the disturbance, if an exit
    /// occurred and containment was re-established.
    pub restoring_time: Option<f64>,
    pub rmse_x: Option<f64>,
    pub rmse_y: Option<f64>,
    pub rmse_rho: Option<f64>,
    /// Window the RMSE values were computed over.
    pub rmse_window: Option<(f64, f64)>,
}

/// Full output of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<StepRow>,
    pub metrics: Metrics,
    /// Cone slant height the run used (configured or solved), m.
    pub cone_slant_height: f64,
    /// Corresponding cone height, m.
    pub cone_height: f64,
}

/// Pose/velocity error component selector for RMSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorComponent {
    X,
    Y,
    Rho,
}

/// Disturbance wrench at time `t`: the configured pulse inside its
/// half-open window, zero elsewhere and when unconfigured.
pub fn disturbance_wrench(t: f64, spec: Option<&DisturbanceSpec>) -> Wrench {
    match spec {
        Some(d) if t >= d.start && t < d.start + d.duration => d.wrench,
        _ => Wrench::ZERO,
    }
}

/// First time the vehicle is inside the cone.
pub fn cone_arrival_time(rows: &[StepRow]) -> Option<f64> {
    rows.iter().find(|row| row.inside_cone).map(|row| row.t)
}

/// Earliest time from which the vehicle stays inside the cone to the end.
/// `None` when the final sample is outside.
pub fn communication_established_time(rows: &[StepRow]) -> Option<f64> {
    if !rows.last()?.inside_cone {
        return None;
    }
    let mut established = None;
    for row in rows.iter().rev() {
        if row.inside_cone {
            established = Some(row.t);
        } else {
            break;
        }
    }
    established
}

/// Restoring span after a disturbance: from the first inside→outside
/// transition at or after `after` to the instant containment is permanently
/// re-established. `None` when no such exit occurred or the run ends outside.
pub fn restoring_time(rows: &[StepRow], after: f64) -> Option<f64> {
    let exit = rows
        .windows(2)
        .find(|w| w[1].t >= after && w[0].inside_cone && !w[1].inside_cone)
        .map(|w| w[1].t)?;
    let reestablished = communication_established_time(rows)?;
    Some(reestablished - exit)
}

/// Root-mean-square reference-tracking error of one pose component over the
/// closed window `[start, end]`. The yaw error is evaluated on the circle.
pub fn rmse(rows: &[StepRow], component: ErrorComponent, window: (f64, f64)) -> Result<f64> {
    let (start, end) = window;
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in rows.iter().filter(|r| r.t >= start && r.t <= end) {
        let err = match component {
            ErrorComponent::X => row.eta_ref.x - row.eta.x,
            ErrorComponent::Y => row.eta_ref.y - row.eta.y,
            ErrorComponent::Rho => wrap_angle(row.eta_ref.z - row.eta.z),
        };
        sum += err * err;
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyWindow { start, end });
    }
    Ok((sum / count as f64).sqrt())
}

fn control_wrench(
    kind: &ControllerKind,
    state: &AuvState,
    reference: &crate::control::ReferenceState,
    params: &AuvParams,
) -> Wrench {
    match kind {
        ControllerKind::Pd { kp, kv } => {
            nlpd_tau(state, reference, params, &GainSchedule::constant(*kp, *kv))
        }
        ControllerKind::Nlpd { schedule } => nlpd_tau(state, reference, params, schedule),
        ControllerKind::None => Wrench::ZERO,
    }
}

fn lyapunov_schedule(kind: &ControllerKind) -> GainSchedule {
    match kind {
        ControllerKind::Pd { kp, kv } => GainSchedule::constant(*kp, *kv),
        ControllerKind::Nlpd { schedule } => *schedule,
        // No feedback: the diagnostic reduces to the kinetic term.
        ControllerKind::None => GainSchedule::constant(f64::MIN_POSITIVE, f64::MIN_POSITIVE),
    }
}

/// Run one closed-loop scenario.
///
/// Per sampling instant: sample the reference, corrupt the controller's
/// state view with measurement noise, compute the control wrench, evaluate
/// the disturbance, record the row (true state, link geometry, containment,
/// rate, Lyapunov value), then advance the plant one RK4 step with both
/// wrenches held. Metrics are derived from the recorded rows afterwards.
pub fn run(scenario: &Scenario) -> Result<RunRecord> {
    scenario.validate()?;
    let plant_params = scenario.auv.with_mass_scale(scenario.mass_scale);
    let controller_params = scenario.auv.with_mass_scale(1.0);
    let slant = match scenario.cone_slant_height {
        Some(s) => s,
        None => solve_slant_height(&scenario.link, scenario.target_ber, scenario.min_bit_rate)?,
    };
    let half_angle = scenario.link.receiver.fov_half_angle;
    let inverse_q = q_inverse(scenario.target_ber)?;
    let v_schedule = lyapunov_schedule(&scenario.controller);
    let mut noise_source = scenario.noise.as_ref().map(|n| (GaussianSource::new(n.seed), *n));

    let steps = scenario.steps();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut state = AuvState::at_rest(scenario.initial_eta);

    for i in 0..=steps {
        let t = i as f64 * scenario.dt;
        let reference = ship_reference(t);

        let measured = match &mut noise_source {
            Some((source, spec)) => {
                let draw = |s: &mut GaussianSource, sigma: f64| sigma * s.next_gaussian();
                AuvState {
                    eta: Vector3::new(
                        state.eta.x + draw(source, spec.sigma_pos),
                        state.eta.y + draw(source, spec.sigma_pos),
                        state.eta.z + draw(source, spec.sigma_yaw),
                    ),
                    nu: Vector3::new(
                        state.nu.x + draw(source, spec.sigma_vel),
                        state.nu.y + draw(source, spec.sigma_vel),
                        state.nu.z + draw(source, spec.sigma_vel),
                    ),
                }
            }
            None => state,
        };

        let tau = control_wrench(
            &scenario.controller,
            &measured,
            &reference,
            &controller_params,
        );
        let tau_w = disturbance_wrench(t, scenario.disturbance.as_ref());

        let apex = Vector3::new(reference.eta_ref.x, reference.eta_ref.y, 0.0);
        let cone = ConeRegion::new(apex, half_angle, slant);
        let position = Vector3::new(state.eta.x, state.eta.y, scenario.depth);
        let containment = cone.contains(&position);
        let geometry = LinkGeometry {
            distance: containment.distance,
            incidence_angle: containment.incidence_angle,
            depth: scenario.depth,
        };
        let rate = bit_rate_for_inverse_q(&scenario.link, &geometry, inverse_q)?;
        let lyapunov = lyapunov_value(
            &tracking_error(&state, &reference),
            &state,
            &controller_params,
            &v_schedule,
        );

        rows.push(StepRow {
            t,
            eta: Vector3::new(state.eta.x, state.eta.y, wrap_angle(state.eta.z)),
            nu: state.nu,
            eta_ref: reference.eta_ref,
            tau,
            distance: containment.distance,
            incidence_angle: containment.incidence_angle,
            bit_rate: rate,
            inside_cone: containment.inside,
            lyapunov,
        });

        if i < steps {
            state = step(&state, &plant_params, &tau, &tau_w, scenario.dt).map_err(|err| {
                match err {
                    Error::NonFinite { component } => Error::Divergence {
                        component,
                        t: (i + 1) as f64 * scenario.dt,
                    },
                    other => other,
                }
            })?;
        }
    }

    let cone_arrival = cone_arrival_time(&rows);
    let established = communication_established_time(&rows);
    let restoring = scenario
        .disturbance
        .as_ref()
        .and_then(|d| restoring_time(&rows, d.start));
    let window = scenario
        .rmse_window
        .or_else(|| established.map(|tb| (tb, scenario.duration)));
    let (rmse_x, rmse_y, rmse_rho) = match window {
        Some(w) => (
            Some(rmse(&rows, ErrorComponent::X, w)?),
            Some(rmse(&rows, ErrorComponent::Y, w)?),
            Some(rmse(&rows, ErrorComponent::Rho, w)?),
        ),
        None => (None, None, None),
    };

    Ok(RunRecord {
        rows,
        metrics: Metrics {
            cone_arrival_time: cone_arrival,
            established_time: established,
            restoring_time: restoring,
            rmse_x,
            rmse_y,
            rmse_rho,
            rmse_window: window,
        },
        cone_slant_height: slant,
        cone_height: slant * half_angle.cos(),
    })
}
