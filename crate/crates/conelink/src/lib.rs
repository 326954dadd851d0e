//! Underwater optical communication link budget and AUV tracking-control
//! simulation.
//!
//! The library models a directed line-of-sight IM/DD optical link between a
//! submerged transmitter and a surface receiver, derives the cone-shaped
//! region around the receiver inside which a minimum bit rate is sustained,
//! and simulates a 3-DOF AUV tracking a circling surface ship under PD and
//! nonlinear-PD control so that the link geometry stays inside that region.
//!
//! Modules:
//! - [`optics`] — Lambertian LoS channel with solar background noise, from
//!   transmitted power down to achievable bit rate.
//! - [`cone`] — the connectivity cone: numeric slant-height solve and
//!   point-containment tests.
//! - [`vehicle`] — 3-DOF rigid-body AUV dynamics with a fixed-step RK4
//!   integrator.
//! - [`control`] — PD and nonlinear-PD trajectory tracking laws, the circular
//!   ship reference, and a Lyapunov-value diagnostic.
//! - [`rng`] — a self-contained, portable PRNG (xoshiro256++) with Gaussian
//!   draws for reproducible measurement noise.
//! - [`sim`] — the closed-loop scenario runner and communication metrics.

pub mod cone;
pub mod control;
mod error;
pub mod optics;
pub mod rng;
pub mod sim;
pub mod vehicle;

pub use cone::{ConeRegion, Containment};
pub use control::{AxisGains, GainSchedule, ReferenceState, TrackingError};
pub use error::{Error, Result};
pub use optics::{LinkBudget, LinkGeometry, OpticalLink, Receiver, Transmitter, Water};
pub use sim::{
    ControllerKind, DisturbanceSpec, Metrics, NoiseSpec, RunRecord, Scenario, StepRow,
};
pub use vehicle::{AuvParams, AuvState, Wrench};
