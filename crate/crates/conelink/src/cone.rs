//! Cone-shaped connectivity region around the surface receiver.
//!
//! The region is a right circular cone with its apex at the receiver, axis
//! pointing straight down into the water, and half-angle equal to the
//! receiver field of view. Its slant height is the range at which the
//! channel still sustains a required bit rate at the target BER; a
//! transmitter anywhere inside the cone therefore sees at least that rate.
//!
//! Coordinates: z measures depth downward from the surface, so the cone axis
//! is the +z unit vector and the apex sits at the ship's surface position
//! with z = 0.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::optics::{bit_rate, LinkGeometry, OpticalLink};

/// Default bisection bracket for the slant-height solve, in metres. The far
/// end is the typical clear-water maximum optical range.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-3, 150.0);

/// Absolute tolerance of the slant-height bisection, m.
pub const SLANT_TOLERANCE: f64 = 1e-6;

/// An immutable right circular cone with vertical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeRegion {
    /// Cone vertex (receiver position on the surface), m.
    pub apex: Vector3<f64>,
    /// Unit axis direction; fixed to +z (downward).
    pub axis: Vector3<f64>,
    /// Half aperture angle, rad.
    pub half_angle: f64,
    /// Slant height, m.
    pub slant_height: f64,
    /// Height along the axis, `slant_height * cos(half_angle)`, m.
    pub height: f64,
}

/// Containment verdict with the geometry used to decide it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Containment {
    pub inside: bool,
    /// Distance from the apex to the point, m.
    pub distance: f64,
    /// Angle between the apex→point direction and the cone axis, rad.
    /// Defined as 0 at the apex itself.
    pub incidence_angle: f64,
}

impl ConeRegion {
    /// Build a cone at `apex` with the given half-angle and slant height.
    pub fn new(apex: Vector3<f64>, half_angle: f64, slant_height: f64) -> Self {
        Self {
            apex,
            axis: Vector3::new(0.0, 0.0, 1.0),
            half_angle,
            slant_height,
            height: slant_height * half_angle.cos(),
        }
    }

    /// Test whether `point` lies inside the closed cone.
    ///
    /// The boundary (lateral surface and spherical cap at the slant height)
    /// counts as inside. The apex is treated as an interior point with a
    /// zero incidence angle.
    pub fn contains(&self, point: &Vector3<f64>) -> Containment {
        let offset = point - self.apex;
        let distance = offset.norm();
        if distance == 0.0 {
            return Containment {
                inside: true,
                distance: 0.0,
                incidence_angle: 0.0,
            };
        }
        let cos_angle = (offset.dot(&self.axis) / distance).clamp(-1.0, 1.0);
        let incidence_angle = cos_angle.acos();
        Containment {
            inside: distance <= self.slant_height && incidence_angle <= self.half_angle,
            distance,
            incidence_angle,
        }
    }
}

/// Solve for the slant height at which the channel along the field-of-view
/// ray drops to `min_bit_rate` at `target_ber`.
///
/// Along that ray a point at slant distance `d` sits at depth
/// `d cos(fov)` with incidence angle equal to the field of view, and the
/// rate is strictly decreasing in `d`, so the root is unique. Uses the
/// default bracket of [`DEFAULT_BRACKET`].
pub fn solve_slant_height(link: &OpticalLink, target_ber: f64, min_bit_rate: f64) -> Result<f64> {
    solve_slant_height_in(link, target_ber, min_bit_rate, DEFAULT_BRACKET)
}

/// [`solve_slant_height`] with an explicit bisection bracket.
pub fn solve_slant_height_in(
    link: &OpticalLink,
    target_ber: f64,
    min_bit_rate: f64,
    bracket: (f64, f64),
) -> Result<f64> {
    if !(min_bit_rate > 0.0) {
        return Err(Error::domain(
            "solve_slant_height",
            format!("min_bit_rate = {min_bit_rate} must be > 0"),
        ));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(
            "solve_slant_height",
            format!("invalid bracket [{lo}, {hi}]"),
        ));
    }
    let psi = link.receiver.fov_half_angle;
    let rate_at = |d: f64| -> Result<f64> {
        let geom = LinkGeometry {
            distance: d,
            incidence_angle: psi,
            depth: d * psi.cos(),
        };
        bit_rate(link, &geom, target_ber)
    };
    let rate_lo = rate_at(lo)?;
    if rate_lo < min_bit_rate {
        return Err(Error::UnreachableRate {
            min_bit_rate,
            max_achievable: rate_lo,
        });
    }
    if rate_at(hi)? >= min_bit_rate {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > SLANT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? >= min_bit_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn table_link() -> OpticalLink {
        OpticalLink::default()
    }

    #[test]
    fn solve_is_self_consistent() {
        // Pick an achievable rate from the model itself, then the solver must
        // return the distance it came from.
        let link = table_link();
        let psi = link.receiver.fov_half_angle;
        let geom = LinkGeometry {
            distance: 2.0,
            incidence_angle: psi,
            depth: 2.0 * psi.cos(),
        };
        let rate = bit_rate(&link, &geom, 1e-4).unwrap();
        let d = solve_slant_height(&link, 1e-4, rate).unwrap();
        assert!((d - 2.0).abs() <= 1e-6, "solver returned {d}");
    }

    #[test]
    fn solve_at_reference_targets() {
        // The model solved at the published operating point (BER 1e-4,
        // 10 Mbit/s). The resulting slant height is frozen here; the
        // published 4.4 m cone corresponds to this model evaluated at an
        // effective BER of 1e-2 instead (see the acceptance suite notes).
        let link = table_link();
        let d = solve_slant_height(&link, 1e-4, 1e7).unwrap();
        assert_relative_eq!(d, 3.517701236452535, epsilon = 1e-5);
    }

    #[test]
    fn solve_bracket_independence() {
        let link = table_link();
        let a = solve_slant_height_in(&link, 1e-4, 1e7, (1e-3, 150.0)).unwrap();
        let b = solve_slant_height_in(&link, 1e-4, 1e7, (0.5, 20.0)).unwrap();
        assert!((a - b).abs() <= 2e-6);
    }

    #[test]
    fn solve_unreachable_rate() {
        let link = table_link();
        match solve_slant_height_in(&link, 1e-4, 1e30, (1.0, 150.0)) {
            Err(Error::UnreachableRate { .. }) => {}
            other => panic!("expected UnreachableRate, got {other:?}"),
        }
    }

    #[test]
    fn solve_bracket_failure() {
        // Rate still above the threshold at both bracket ends.
        let link = table_link();
        match solve_slant_height_in(&link, 1e-4, 1.0, (0.1, 0.2)) {
            Err(Error::BracketFailure { .. }) => {}
            other => panic!("expected BracketFailure, got {other:?}"),
        }
    }

    #[test]
    fn height_matches_slant_times_cosine() {
        let cone = ConeRegion::new(Vector3::zeros(), 30.0_f64.to_radians(), 4.4);
        assert_relative_eq!(
            cone.height,
            4.4 * 30.0_f64.to_radians().cos(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn contains_on_axis_interior() {
        let half = 30.0_f64.to_radians();
        let cone = ConeRegion::new(Vector3::zeros(), half, 4.4);
        let c = cone.contains(&Vector3::new(0.0, 0.0, cone.height));
        assert!(c.inside);
        assert_eq!(c.incidence_angle, 0.0);
        assert!(c.distance < cone.slant_height);
    }

    #[test]
    fn contains_beyond_slant_on_axis() {
        let cone = ConeRegion::new(Vector3::zeros(), 30.0_f64.to_radians(), 4.4);
        let c = cone.contains(&Vector3::new(0.0, 0.0, 4.4 + 1e-9));
        assert!(!c.inside, "distance beyond the slant height");
    }

    #[test]
    fn contains_just_past_half_angle() {
        let half = 30.0_f64.to_radians();
        let cone = ConeRegion::new(Vector3::zeros(), half, 4.4);
        let r = half.tan() + 1e-6;
        let c = cone.contains(&Vector3::new(r, 0.0, 1.0));
        assert!(!c.inside, "angle exceeded even though distance is small");
        assert!(c.distance < cone.slant_height);
    }

    #[test]
    fn contains_apex() {
        let apex = Vector3::new(1.0, -2.0, 0.0);
        let cone = ConeRegion::new(apex, 30.0_f64.to_radians(), 4.4);
        let c = cone.contains(&apex);
        assert!(c.inside);
        assert_eq!(c.distance, 0.0);
        assert_eq!(c.incidence_angle, 0.0);
    }

    #[test]
    fn lateral_surface_rate_equals_threshold() {
        // Points sampled on the lateral surface of a solver-built cone see
        // the rate the cone was built for.
        let link = table_link();
        let min_rate = 2e7;
        let slant = solve_slant_height(&link, 1e-4, min_rate).unwrap();
        let psi = link.receiver.fov_half_angle;
        for k in 0..12 {
            let theta = k as f64 * std::f64::consts::PI / 6.0;
            let r = slant * psi.sin();
            let point = Vector3::new(r * theta.cos(), r * theta.sin(), slant * psi.cos());
            let geom = LinkGeometry {
                distance: point.norm(),
                incidence_angle: psi,
                depth: point.z,
            };
            let rate = bit_rate(&link, &geom, 1e-4).unwrap();
            assert_relative_eq!(rate, min_rate, max_relative = 1e-5);
        }
    }

    proptest! {
        #[test]
        fn prop_rotation_invariance_about_axis(
            x in -6.0f64..6.0,
            y in -6.0f64..6.0,
            z in -1.0f64..8.0,
            theta in 0.0f64..std::f64::consts::TAU,
            ax in -3.0f64..3.0,
            ay in -3.0f64..3.0,
        ) {
            let apex = Vector3::new(ax, ay, 0.0);
            let cone = ConeRegion::new(apex, 30.0_f64.to_radians(), 4.4);
            let p = Vector3::new(x, y, z);
            let rel = p - apex;
            let rotated = apex + Vector3::new(
                theta.cos() * rel.x - theta.sin() * rel.y,
                theta.sin() * rel.x + theta.cos() * rel.y,
                rel.z,
            );
            prop_assert_eq!(cone.contains(&p).inside, cone.contains(&rotated).inside);
        }
    }
}
