//! Directed line-of-sight IM/DD optical channel with solar background noise.
//!
//! The signal path is: Lambertian radiant intensity at the transmitter,
//! effective collection area (optical concentrator) at the receiver,
//! exponential attenuation along the water path, photodetection. Solar
//! downwelling irradiance leaking into the receiver sets a shot-noise floor,
//! and for on-off keying the achievable bit rate at a target bit error rate
//! follows from the resulting SNR.
//!
//! All functions are pure; every quantity is SI (W, m, rad, A, bit/s).

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Elementary charge in coulombs (2019 SI exact value).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// Smallest accepted transmitter half-angle, in radians. Below this the
/// Lambert mode number overflows toward infinity.
pub const MIN_HALF_ANGLE: f64 = 1e-6;

/// Optical source parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Transmitter {
    /// Average emitted optical power, W.
    pub power_tx: f64,
    /// Half-angle at half power of the source beam, rad.
    pub half_angle: f64,
    /// Receiver-side optical bandpass filter width matched to the source, nm.
    pub filter_bandwidth: f64,
}

impl Default for Transmitter {
    fn default() -> Self {
        Self {
            power_tx: 0.1,
            half_angle: 15.0_f64.to_radians(),
            filter_bandwidth: 30.0,
        }
    }
}

/// Photodetector and concentrator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Receiver {
    /// Detector active area, m².
    pub area: f64,
    /// Half-angle field of view of the concentrator, rad.
    pub fov_half_angle: f64,
    /// Refractive index of the concentrator medium.
    pub refractive_index: f64,
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
}

impl Default for Receiver {
    fn default() -> Self {
        Self {
            area: 1e-4,
            fov_half_angle: 30.0_f64.to_radians(),
            refractive_index: 1.52,
            responsivity: 0.6,
        }
    }
}

/// Water-column optical properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Water {
    /// Beam attenuation coefficient, 1/m.
    pub attenuation: f64,
    /// Water transmittance applied to the solar path.
    pub transmittance: f64,
    /// Solar spectral downwelling irradiance at the surface, W/(m²·nm).
    pub surface_irradiance: f64,
    /// When true, the solar noise power applies the water-column attenuation
    /// once instead of twice. The literal noise model attenuates the surface
    /// irradiance and then attenuates again inside the noise-power product;
    /// this switch drops the second factor for sensitivity studies.
    pub solar_single_attenuation: bool,
}

impl Default for Water {
    fn default() -> Self {
        Self {
            attenuation: 0.15,
            transmittance: 0.95,
            surface_irradiance: 0.7645,
            solar_single_attenuation: false,
        }
    }
}

/// Transmitter, receiver, and water parameters of one optical channel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticalLink {
    pub transmitter: Transmitter,
    pub receiver: Receiver,
    pub water: Water,
}

/// Instantaneous transmitter/receiver geometry.
///
/// Under the pointing assumption (transmitter aimed straight up, receiver
/// straight down) the transmitter pointing angle equals the receiver
/// incidence angle, so a single angle describes the alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Euclidean transmitter→receiver distance, m.
    pub distance: f64,
    /// Incidence angle at the receiver (= pointing angle at the transmitter), rad.
    pub incidence_angle: f64,
    /// Vertical depth of the transmitter below the surface, m.
    pub depth: f64,
}

/// Full channel evaluation at one geometry and target bit error rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Optical signal power reaching the detector, W.
    pub received_power: f64,
    /// Signal photocurrent, A.
    pub photocurrent: f64,
    /// Solar background optical power entering the detector, W.
    pub noise_power: f64,
    /// Shot-noise variance at the achieved bit rate, A².
    pub noise_variance: f64,
    /// Electrical signal-to-noise ratio at the achieved bit rate.
    pub snr: f64,
    /// Bit error rate at the achieved bit rate (equals the target).
    pub ber: f64,
    /// Achievable bit rate at the target BER, bit/s.
    pub bit_rate: f64,
}

impl Transmitter {
    pub fn validate(&self) -> Result<()> {
        if !(self.power_tx > 0.0) {
            return Err(Error::InvalidParameter(
                "transmitter.power_tx must be > 0".into(),
            ));
        }
        if !(self.half_angle >= MIN_HALF_ANGLE && self.half_angle < FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "transmitter.half_angle must lie in [{MIN_HALF_ANGLE}, pi/2) rad"
            )));
        }
        if !(self.filter_bandwidth > 0.0) {
            return Err(Error::InvalidParameter(
                "transmitter.filter_bandwidth must be > 0".into(),
            ));
        }
        Ok(())
    }
}

impl Receiver {
    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0) {
            return Err(Error::InvalidParameter("receiver.area must be > 0".into()));
        }
        if !(self.fov_half_angle > 0.0 && self.fov_half_angle < FRAC_PI_2) {
            return Err(Error::InvalidParameter(
                "receiver.fov_half_angle must lie in (0, pi/2) rad".into(),
            ));
        }
        if !(self.refractive_index >= 1.0) {
            return Err(Error::InvalidParameter(
                "receiver.refractive_index must be >= 1".into(),
            ));
        }
        if !(self.responsivity > 0.0) {
            return Err(Error::InvalidParameter(
                "receiver.responsivity must be > 0".into(),
            ));
        }
        Ok(())
    }
}

impl Water {
    pub fn validate(&self) -> Result<()> {
        if !(self.attenuation > 0.0) {
            return Err(Error::InvalidParameter(
                "water.attenuation must be > 0".into(),
            ));
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::InvalidParameter(
                "water.transmittance must lie in (0, 1]".into(),
            ));
        }
        if !(self.surface_irradiance >= 0.0) {
            return Err(Error::InvalidParameter(
                "water.surface_irradiance must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

impl OpticalLink {
    pub fn validate(&self) -> Result<()> {
        self.transmitter.validate()?;
        self.receiver.validate()?;
        self.water.validate()
    }
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance >= 0.0) {
            return Err(Error::InvalidParameter(
                "geometry.distance must be >= 0".into(),
            ));
        }
        if !(self.depth >= 0.0) {
            return Err(Error::InvalidParameter("geometry.depth must be >= 0".into()));
        }
        if !(0.0..=PI).contains(&self.incidence_angle) {
            return Err(Error::InvalidParameter(
                "geometry.incidence_angle must lie in [0, pi]".into(),
            ));
        }
        Ok(())
    }
}

/// Lambert mode number `m = -ln 2 / ln(cos half_angle)`.
///
/// `m` shapes the `cos^m` radiant-intensity lobe; a 60° half-angle gives the
/// ideal Lambertian `m = 1`, narrower beams give larger `m`.
pub fn lambert_mode(half_angle: f64) -> Result<f64> {
    if !(half_angle >= MIN_HALF_ANGLE) {
        return Err(Error::domain(
            "lambert_mode",
            format!("half_angle {half_angle} rad below minimum {MIN_HALF_ANGLE} rad"),
        ));
    }
    let c = half_angle.cos();
    if c <= 0.0 {
        return Err(Error::domain(
            "lambert_mode",
            format!("cos(half_angle) = {c} outside (0, 1)"),
        ));
    }
    Ok(-std::f64::consts::LN_2 / c.ln())
}

/// Radiant intensity `P_tx (m+1)/(2 pi d^2) cos^m(pointing_angle)` in W/m².
///
/// Returns 0 for pointing angles at or beyond 90°, the natural limit of the
/// Lambertian lobe.
pub fn radiant_intensity(tx: &Transmitter, distance: f64, pointing_angle: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain(
            "radiant_intensity",
            format!("distance {distance} m must be > 0"),
        ));
    }
    let m = lambert_mode(tx.half_angle)?;
    let c = pointing_angle.abs().cos();
    if c <= 0.0 {
        return Ok(0.0);
    }
    Ok(tx.power_tx * (m + 1.0) / (2.0 * PI * distance * distance) * c.powf(m))
}

/// Effective light-collection area `f(psi) A_r cos(psi)` in m².
///
/// The concentrator gain `f = n² / sin²(fov)` applies inside the field of
/// view (boundary included); outside, the collection area is exactly zero.
pub fn effective_area(rx: &Receiver, incidence_angle: f64) -> f64 {
    let psi = incidence_angle.abs();
    if psi > rx.fov_half_angle {
        return 0.0;
    }
    let s = rx.fov_half_angle.sin();
    let gain = rx.refractive_index * rx.refractive_index / (s * s);
    gain * rx.area * psi.cos()
}

/// Water-column loss `exp(-attenuation * path_length)`.
pub fn channel_loss(water: &Water, path_length: f64) -> f64 {
    (-water.attenuation * path_length).exp()
}

/// Signal photocurrent at the receiver, A.
///
/// Composes radiant intensity, effective area, channel loss, and
/// responsivity. The attenuation path is the slant transmitter→receiver
/// distance; the result is exactly zero outside the field of view.
pub fn received_photocurrent(
    tx: &Transmitter,
    rx: &Receiver,
    water: &Water,
    geom: &LinkGeometry,
) -> Result<f64> {
    let area = effective_area(rx, geom.incidence_angle);
    if area == 0.0 {
        return Ok(0.0);
    }
    let intensity = radiant_intensity(tx, geom.distance, geom.incidence_angle)?;
    Ok(rx.responsivity * intensity * area * channel_loss(water, geom.distance))
}

/// Solar background optical power entering the receiver, W.
///
/// The surface irradiance decays exponentially to the transmitter depth and
/// the noise-power product carries the attenuation factor again, matching
/// the literal noise model; `water.solar_single_attenuation` drops the second
/// factor. Sunlight travels vertically, so the path here is the depth, not
/// the slant range.
pub fn solar_noise_power(
    rx: &Receiver,
    water: &Water,
    filter_bandwidth: f64,
    depth: f64,
    incidence_angle: f64,
) -> f64 {
    let att = channel_loss(water, depth);
    let irradiance_at_depth = water.surface_irradiance * att;
    let second = if water.solar_single_attenuation {
        1.0
    } else {
        att
    };
    irradiance_at_depth
        * water.transmittance
        * filter_bandwidth
        * second
        * effective_area(rx, incidence_angle)
}

/// Shot-noise variance `2 e R P_b B` in A².
pub fn noise_variance(noise_power: f64, responsivity: f64, bit_rate: f64) -> f64 {
    2.0 * ELECTRON_CHARGE * responsivity * noise_power * bit_rate
}

/// Standard normal tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Inverse of [`q_function`] on p ∈ (0, 0.5], by bracketed bisection.
///
/// The root is bracketed in x ∈ [0, 40] and bisected to an interval width of
/// 1e-13, which keeps the round trip `Q(Q⁻¹(p))` within 1e-12 relative of p.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::domain(
            "q_inverse",
            format!("p = {p} outside (0, 0.5]"),
        ));
    }
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    // Q(lo) = 0.5 >= p, Q(hi) ~ 1e-350 < p for any representable p > 0.
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) >= p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Electrical SNR `photocurrent² / noise_variance`.
///
/// A zero noise variance with nonzero signal is the noise-free limit and is
/// rejected; callers should work with the bit rate directly in that regime.
pub fn snr(photocurrent: f64, noise_variance: f64) -> Result<f64> {
    if noise_variance == 0.0 {
        if photocurrent == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::domain(
            "snr",
            "noise variance is zero with nonzero photocurrent (noise-free limit)",
        ));
    }
    Ok(photocurrent * photocurrent / noise_variance)
}

/// OOK bit error rate `Q(sqrt(snr))`.
pub fn ber(snr: f64) -> f64 {
    q_function(snr.sqrt())
}

/// Achievable bit rate at `target_ber`, bit/s.
///
/// `B = [photocurrent / Q⁻¹(ber)]² / (2 e R P_b)`. Returns 0 outside the
/// field of view; a zero solar noise power inside the field of view makes the
/// rate unbounded and is rejected.
pub fn bit_rate(link: &OpticalLink, geom: &LinkGeometry, target_ber: f64) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return Err(Error::domain(
            "bit_rate",
            format!("target_ber = {target_ber} outside (0, 0.5)"),
        ));
    }
    bit_rate_for_inverse_q(link, geom, q_inverse(target_ber)?)
}

/// [`bit_rate`] with the inverse Q value precomputed, for callers that
/// evaluate many geometries at one target BER.
pub fn bit_rate_for_inverse_q(
    link: &OpticalLink,
    geom: &LinkGeometry,
    inverse_q: f64,
) -> Result<f64> {
    if !(inverse_q > 0.0) {
        return Err(Error::domain(
            "bit_rate",
            format!("inverse Q value {inverse_q} must be > 0"),
        ));
    }
    if geom.incidence_angle.abs() > link.receiver.fov_half_angle {
        return Ok(0.0);
    }
    let photocurrent =
        received_photocurrent(&link.transmitter, &link.receiver, &link.water, geom)?;
    let noise_power = solar_noise_power(
        &link.receiver,
        &link.water,
        link.transmitter.filter_bandwidth,
        geom.depth,
        geom.incidence_angle,
    );
    if noise_power == 0.0 {
        return Err(Error::domain(
            "bit_rate",
            "solar noise power is zero; the achievable rate is unbounded",
        ));
    }
    let ratio = photocurrent / inverse_q;
    Ok(ratio * ratio / (2.0 * ELECTRON_CHARGE * link.receiver.responsivity * noise_power))
}

/// Evaluate the whole link budget at one geometry and target BER.
pub fn link_budget(link: &OpticalLink, geom: &LinkGeometry, target_ber: f64) -> Result<LinkBudget> {
    let photocurrent =
        received_photocurrent(&link.transmitter, &link.receiver, &link.water, geom)?;
    let received_power = if link.receiver.responsivity > 0.0 {
        photocurrent / link.receiver.responsivity
    } else {
        0.0
    };
    let noise_power = solar_noise_power(
        &link.receiver,
        &link.water,
        link.transmitter.filter_bandwidth,
        geom.depth,
        geom.incidence_angle,
    );
    if photocurrent == 0.0 {
        // Out of the field of view: no signal, no concentrated background.
        return Ok(LinkBudget {
            received_power: 0.0,
            photocurrent: 0.0,
            noise_power,
            noise_variance: 0.0,
            snr: 0.0,
            ber: 0.5,
            bit_rate: 0.0,
        });
    }
    let rate = bit_rate(link, geom, target_ber)?;
    let variance = noise_variance(noise_power, link.receiver.responsivity, rate);
    let snr_value = snr(photocurrent, variance)?;
    Ok(LinkBudget {
        received_power,
        photocurrent,
        noise_power,
        noise_variance: variance,
        snr: snr_value,
        ber: ber(snr_value),
        bit_rate: rate,
    })
}
