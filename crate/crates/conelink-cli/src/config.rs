//! Run configuration: a strict TOML schema over the scenario, channel, and
//! cone parameters, with the reference defaults filled in for every omitted
//! field.
//!
//! Unknown keys are rejected everywhere so a typo in one of the thirty-odd
//! physical parameters fails loudly instead of silently running the default.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use conelink::sim::{ControllerKind, DisturbanceSpec, NoiseSpec, Scenario, REFERENCE_CONE_HEIGHT};
use conelink::{AuvParams, AxisGains, GainSchedule, OpticalLink, Wrench};

/// Errors from parsing, validating, or exporting configurations.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("config validation error: {0}")]
    Validation(String),
}

impl From<conelink::Error> for ConfigError {
    fn from(err: conelink::Error) -> Self {
        ConfigError::Validation(err.to_string())
    }
}

/// Controller section. `type` selects the law; the remaining keys must match
/// the selected type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// One of `pd`, `nlpd`, `none`.
    #[serde(rename = "type")]
    pub kind: String,
    /// PD proportional gain (pd only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kp: Option<f64>,
    /// PD velocity gain (pd only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kv: Option<f64>,
    /// Per-axis schedules (nlpd only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<AxisGains>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<AxisGains>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yaw: Option<AxisGains>,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: "pd".into(),
            kp: None,
            kv: None,
            x: None,
            y: None,
            yaw: None,
        }
    }
}

impl ControllerConfig {
    pub fn pd() -> Self {
        Self::default()
    }

    pub fn nlpd() -> Self {
        Self {
            kind: "nlpd".into(),
            ..Self::default()
        }
    }

    fn build(&self) -> Result<ControllerKind, ConfigError> {
        match self.kind.as_str() {
            "pd" => {
                if self.x.is_some() || self.y.is_some() || self.yaw.is_some() {
                    return Err(ConfigError::Validation(
                        "controller.x/y/yaw apply only to type = \"nlpd\"".into(),
                    ));
                }
                Ok(ControllerKind::Pd {
                    kp: self.kp.unwrap_or(300.0),
                    kv: self.kv.unwrap_or(250.0),
                })
            }
            "nlpd" => {
                if self.kp.is_some() || self.kv.is_some() {
                    return Err(ConfigError::Validation(
                        "controller.kp/kv apply only to type = \"pd\"".into(),
                    ));
                }
                let defaults = GainSchedule::default();
                Ok(ControllerKind::Nlpd {
                    schedule: GainSchedule {
                        x: self.x.unwrap_or(defaults.x),
                        y: self.y.unwrap_or(defaults.y),
                        yaw: self.yaw.unwrap_or(defaults.yaw),
                    },
                })
            }
            "none" => {
                if self.kp.is_some()
                    || self.kv.is_some()
                    || self.x.is_some()
                    || self.y.is_some()
                    || self.yaw.is_some()
                {
                    return Err(ConfigError::Validation(
                        "controller type \"none\" takes no gain keys".into(),
                    ));
                }
                Ok(ControllerKind::None)
            }
            other => Err(ConfigError::Validation(format!(
                "unknown controller type \"{other}\" (expected pd, nlpd, or none)"
            ))),
        }
    }
}

/// Disturbance pulse section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisturbanceConfig {
    pub start: f64,
    pub duration: f64,
    /// Body-frame wrench: surge N, sway N, yaw N·m.
    pub wrench: [f64; 3],
}

impl Default for DisturbanceConfig {
    fn default() -> Self {
        Self {
            start: 30.0,
            duration: 1.0,
            wrench: [350.0, 350.0, 350.0],
        }
    }
}

/// Measurement noise section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_pos: f64,
    pub sigma_yaw: f64,
    pub sigma_vel: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let spec = NoiseSpec::default();
        Self {
            sigma_pos: spec.sigma_pos,
            sigma_yaw: spec.sigma_yaw,
            sigma_vel: spec.sigma_vel,
            seed: spec.seed,
        }
    }
}

/// Connectivity-cone section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeConfig {
    pub target_ber: f64,
    pub min_bit_rate: f64,
    /// Explicit slant height in metres. Omit to solve it from the channel
    /// model at (`target_ber`, `min_bit_rate`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slant_height: Option<f64>,
}

impl Default for ConeConfig {
    fn default() -> Self {
        Self {
            target_ber: 1e-4,
            min_bit_rate: 1e7,
            slant_height: Some(reference_slant_height()),
        }
    }
}

/// Slant height of the reference cone the bundled scenarios use:
/// the published 3.8157 m cone height over a 30° half-angle.
pub fn reference_slant_height() -> f64 {
    REFERENCE_CONE_HEIGHT / OpticalLink::default().receiver.fov_half_angle.cos()
}

/// Full run configuration. An empty document parses to the reference
/// nominal PD scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub duration: f64,
    pub dt: f64,
    pub initial_eta: [f64; 3],
    pub depth: f64,
    pub mass_scale: f64,
    /// Fixed RMSE window [start, end] in seconds; omit to use
    /// [established time, duration].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse_window: Option<[f64; 2]>,
    pub controller: ControllerConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    pub auv: AuvParams,
    pub optics: OpticalLink,
    pub cone: ConeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "nominal".into(),
            duration: 150.0,
            dt: 0.005,
            initial_eta: [5.0, 5.0, 0.0],
            depth: REFERENCE_CONE_HEIGHT,
            mass_scale: 1.0,
            rmse_window: Some([5.0, 150.0]),
            controller: ControllerConfig::default(),
            disturbance: None,
            noise: None,
            auv: AuvParams::default(),
            optics: OpticalLink::default(),
            cone: ConeConfig::default(),
        }
    }
}

impl RunConfig {
    /// Assemble the scenario, validating every module invariant.
    pub fn build_scenario(&self) -> Result<Scenario, ConfigError> {
        let scenario = Scenario {
            name: self.name.clone(),
            duration: self.duration,
            dt: self.dt,
            initial_eta: Vector3::new(
                self.initial_eta[0],
                self.initial_eta[1],
                self.initial_eta[2],
            ),
            depth: self.depth,
            controller: self.controller.build()?,
            disturbance: self.disturbance.map(|d| DisturbanceSpec {
                start: d.start,
                duration: d.duration,
                wrench: Wrench::new(d.wrench[0], d.wrench[1], d.wrench[2]),
            }),
            noise: self.noise.map(|n| NoiseSpec {
                sigma_pos: n.sigma_pos,
                sigma_yaw: n.sigma_yaw,
                sigma_vel: n.sigma_vel,
                seed: n.seed,
            }),
            mass_scale: self.mass_scale,
            auv: self.auv,
            link: self.optics,
            target_ber: self.cone.target_ber,
            min_bit_rate: self.cone.min_bit_rate,
            cone_slant_height: self.cone.slant_height,
            rmse_window: self.rmse_window.map(|w| (w[0], w[1])),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Canonical TOML serialization; `parse_config` of the result yields an
    /// equal config.
    pub fn serialize(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Override the controller type, keeping everything else.
    pub fn with_controller(mut self, controller: ControllerConfig, suffix: &str) -> Self {
        self.controller = controller;
        if !suffix.is_empty() {
            self.name = format!("{}-{}", self.name, suffix);
        }
        self
    }
}

/// Parse and fully validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text)?;
    config.build_scenario()?;
    Ok(config)
}

/// Scenario presets mirroring the three reference experiments.
///
/// - `nominal`: no disturbance, no noise.
/// - `case1`: a (350 N, 350 N, 350 N·m) body-frame pulse at 30 s lasting
///   1 s, plus measurement noise.
/// - `case2`: case1 with the plant inertia scaled by 1.2.
///
/// All presets fix the RMSE comparison window to [5 s, 150 s] so the PD and
/// NLPD numbers are computed over the same samples.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let base = RunConfig::default();
    match name {
        "nominal" => Ok(base),
        "case1" => Ok(RunConfig {
            name: "case1".into(),
            disturbance: Some(DisturbanceConfig::default()),
            noise: Some(NoiseConfig::default()),
            ..base
        }),
        "case2" => Ok(RunConfig {
            name: "case2".into(),
            disturbance: Some(DisturbanceConfig::default()),
            noise: Some(NoiseConfig::default()),
            mass_scale: 1.2,
            ..base
        }),
        other => Err(ConfigError::Validation(format!(
            "unknown preset \"{other}\" (expected nominal, case1, or case2)"
        ))),
    }
}
