//! 3-DOF horizontal-plane AUV rigid-body model and fixed-step integrator.
//!
//! Body-frame dynamics `M nu_dot + C(nu) nu + D(nu) nu = tau + tau_w` with a
//! diagonal inertia matrix, velocity-dependent Coriolis coupling, and
//! linear-plus-quadratic damping; world-frame kinematics `eta_dot = R(rho) nu`
//! with the planar rotation `R`. Restoring forces vanish in the horizontal
//! plane. Integration is classical RK4 at a fixed step with the applied
//! wrenches held constant across the four stages (zero-order hold, matching
//! a discrete controller at the sampling rate).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// World pose `eta = (x, y, rho)` and body velocity `nu = (u, v, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuvState {
    pub eta: Vector3<f64>,
    pub nu: Vector3<f64>,
}

impl AuvState {
    pub fn new(eta: Vector3<f64>, nu: Vector3<f64>) -> Self {
        Self { eta, nu }
    }

    /// State at rest at the given pose.
    pub fn at_rest(eta: Vector3<f64>) -> Self {
        Self {
            eta,
            nu: Vector3::zeros(),
        }
    }
}

/// Inertia and damping parameters.
///
/// `mass_scale` multiplies the three inertia terms and models a mass
/// parameter error in the plant; damping is left untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuvParams {
    /// Surge inertia (mass plus added mass), kg.
    pub m11: f64,
    /// Sway inertia, kg.
    pub m22: f64,
    /// Yaw inertia, kg·m².
    pub m33: f64,
    /// Linear damping coefficients, kg/s (kg·m²/s in yaw).
    pub d11_lin: f64,
    pub d22_lin: f64,
    pub d33_lin: f64,
    /// Quadratic damping coefficients, kg/m (kg·m² in yaw).
    pub d11_quad: f64,
    pub d22_quad: f64,
    pub d33_quad: f64,
    /// Multiplier applied to the inertia terms.
    pub mass_scale: f64,
}

impl Default for AuvParams {
    fn default() -> Self {
        Self {
            m11: 100.0,
            m22: 250.0,
            m33: 80.0,
            d11_lin: 70.0,
            d22_lin: 100.0,
            d33_lin: 50.0,
            d11_quad: 100.0,
            d22_quad: 200.0,
            d33_quad: 100.0,
            mass_scale: 1.0,
        }
    }
}

impl AuvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m11 > 0.0 && self.m22 > 0.0 && self.m33 > 0.0) {
            return Err(Error::InvalidParameter(
                "auv inertia terms m11, m22, m33 must be > 0".into(),
            ));
        }
        let damping = [
            self.d11_lin,
            self.d22_lin,
            self.d33_lin,
            self.d11_quad,
            self.d22_quad,
            self.d33_quad,
        ];
        if damping.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::InvalidParameter(
                "auv damping coefficients must be >= 0".into(),
            ));
        }
        if !(self.mass_scale > 0.0) {
            return Err(Error::InvalidParameter("auv.mass_scale must be > 0".into()));
        }
        Ok(())
    }

    /// Copy with the given mass scale.
    pub fn with_mass_scale(mut self, scale: f64) -> Self {
        self.mass_scale = scale;
        self
    }

    /// Effective (scaled) inertia diagonal.
    pub fn inertia(&self) -> Vector3<f64> {
        Vector3::new(self.m11, self.m22, self.m33) * self.mass_scale
    }
}

/// Generalized force: surge and sway forces in N, yaw moment in N·m.
/// Used for both the control input and external disturbances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wrench {
    pub surge: f64,
    pub sway: f64,
    pub yaw: f64,
}

impl Wrench {
    pub const ZERO: Wrench = Wrench {
        surge: 0.0,
        sway: 0.0,
        yaw: 0.0,
    };

    pub fn new(surge: f64, sway: f64, yaw: f64) -> Self {
        Self { surge, sway, yaw }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.surge, self.sway, self.yaw)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self {
            surge: v.x,
            sway: v.y,
            yaw: v.z,
        }
    }
}

/// Coriolis/centripetal matrix `C(nu)`; skew-symmetric by construction.
pub fn coriolis_matrix(nu: &Vector3<f64>, params: &AuvParams) -> Matrix3<f64> {
    let m = params.inertia();
    let (u, v) = (nu.x, nu.y);
    Matrix3::new(
        0.0,
        0.0,
        -m.y * v,
        0.0,
        0.0,
        m.x * u,
        m.y * v,
        -m.x * u,
        0.0,
    )
}

/// Diagonal damping matrix `D(nu)` with linear plus quadratic terms.
pub fn damping_matrix(nu: &Vector3<f64>, params: &AuvParams) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(
        params.d11_lin + params.d11_quad * nu.x.abs(),
        params.d22_lin + params.d22_quad * nu.y.abs(),
        params.d33_lin + params.d33_quad * nu.z.abs(),
    ))
}

/// Planar rotation from body to world frame.
pub fn rotation(rho: f64) -> Matrix3<f64> {
    let (s, c) = rho.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// World-frame pose rate `eta_dot = R(rho) nu`.
pub fn world_kinematics(state: &AuvState) -> Vector3<f64> {
    rotation(state.eta.z) * state.nu
}

/// Body-frame acceleration `nu_dot = M^-1 (tau + tau_w - C(nu) nu - D(nu) nu)`.
pub fn body_acceleration(
    state: &AuvState,
    params: &AuvParams,
    tau: &Wrench,
    tau_w: &Wrench,
) -> Vector3<f64> {
    let m = params.inertia();
    let force = tau.as_vector() + tau_w.as_vector()
        - coriolis_matrix(&state.nu, params) * state.nu
        - damping_matrix(&state.nu, params) * state.nu;
    Vector3::new(force.x / m.x, force.y / m.y, force.z / m.z)
}

/// Dynamics matrices expressed in the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldFrameTerms {
    /// `M(eta) = R M R^T`; symmetric positive definite.
    pub inertia: Matrix3<f64>,
    /// `C(nu, eta) = R [C(nu) - M R^T R_dot] R^T`.
    pub coriolis: Matrix3<f64>,
    /// `D(nu, eta) = R D(nu) R^T`; positive definite.
    pub damping: Matrix3<f64>,
}

/// Transform the body-frame dynamics matrices into the world frame.
///
/// `R_dot = dR/drho * r`, and the inverse of the rotation is its transpose.
pub fn world_frame_terms(state: &AuvState, params: &AuvParams) -> WorldFrameTerms {
    let r_mat = rotation(state.eta.z);
    let r_t = r_mat.transpose();
    let inertia_body = Matrix3::from_diagonal(&params.inertia());
    // R^T R_dot reduces to r times the planar spin generator.
    let spin = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0) * state.nu.z;
    WorldFrameTerms {
        inertia: r_mat * inertia_body * r_t,
        coriolis: r_mat * (coriolis_matrix(&state.nu, params) - inertia_body * spin) * r_t,
        damping: r_mat * damping_matrix(&state.nu, params) * r_t,
    }
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

fn state_derivative(state: &AuvState, params: &AuvParams, tau: &Wrench, tau_w: &Wrench) -> AuvState {
    AuvState {
        eta: world_kinematics(state),
        nu: body_acceleration(state, params, tau, tau_w),
    }
}

fn state_axpy(state: &AuvState, k: &AuvState, h: f64) -> AuvState {
    AuvState {
        eta: state.eta + k.eta * h,
        nu: state.nu + k.nu * h,
    }
}

/// Advance the coupled kinematics/dynamics one step by classical RK4.
///
/// The yaw angle is integrated unwrapped; wrap only at reporting boundaries.
/// Errors with the name of the first non-finite state component if the
/// trajectory diverges.
pub fn step(
    state: &AuvState,
    params: &AuvParams,
    tau: &Wrench,
    tau_w: &Wrench,
    dt: f64,
) -> Result<AuvState> {
    debug_assert!(dt > 0.0);
    let k1 = state_derivative(state, params, tau, tau_w);
    let k2 = state_derivative(&state_axpy(state, &k1, 0.5 * dt), params, tau, tau_w);
    let k3 = state_derivative(&state_axpy(state, &k2, 0.5 * dt), params, tau, tau_w);
    let k4 = state_derivative(&state_axpy(state, &k3, dt), params, tau, tau_w);
    let next = AuvState {
        eta: state.eta + (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta) * (dt / 6.0),
        nu: state.nu + (k1.nu + 2.0 * k2.nu + 2.0 * k3.nu + k4.nu) * (dt / 6.0),
    };
    let components = [
        ("x", next.eta.x),
        ("y", next.eta.y),
        ("rho", next.eta.z),
        ("u", next.nu.x),
        ("v", next.nu.y),
        ("r", next.nu.z),
    ];
    for (name, value) in components {
        if !value.is_finite() {
            return Err(Error::NonFinite { component: name });
        }
    }
    Ok(next)
}
