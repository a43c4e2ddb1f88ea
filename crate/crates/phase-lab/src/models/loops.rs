//! Closed loops in parameter space.
//!
//! Planar loops live in the complex plane (coherent-state displacement),
//! spherical loops are traced by the direction of a magnetic field. All
//! loops are parameterized on t ∈ [0, 1] with uniform sampling; midpoint
//! values at half-steps are well defined, which the second-order product
//! integrators rely on.

use super::ModelError;
use crate::linops::C64;
use std::f64::consts::PI;

/// Loop geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum LoopKind {
    /// `z(t) = center + radius·e^{2πi·winding·t}`; counterclockwise for
    /// positive winding.
    CirclePlane { center: C64, radius: f64, winding: i32 },
    /// Fixed polar angle, azimuth sweeping `2π·winding`.
    SphereLatitude { theta0: f64, winding: i32 },
    /// Great circle through both poles at fixed azimuth.
    SphereLongitude { phi0: f64 },
    /// Piecewise-linear planar loop over the listed vertices.
    PolygonPlane { vertices: Vec<C64> },
}

/// A closed parameter-space path plus its default sample count.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterLoop {
    pub kind: LoopKind,
    pub samples: usize,
}

impl ParameterLoop {
    pub fn new(kind: LoopKind, samples: usize) -> Result<Self, ModelError> {
        if samples < 8 {
            return Err(ModelError::InvalidParameter(format!(
                "loop needs at least 8 samples, got {samples}"
            )));
        }
        match &kind {
            LoopKind::CirclePlane { radius, .. } => {
                if !radius.is_finite() || *radius < 0.0 {
                    return Err(ModelError::InvalidParameter(format!(
                        "circle radius must be nonnegative, got {radius}"
                    )));
                }
            }
            LoopKind::SphereLatitude { theta0, .. } => {
                if !(0.0..=PI).contains(theta0) {
                    return Err(ModelError::InvalidParameter(format!(
                        "latitude polar angle must lie in [0, π], got {theta0}"
                    )));
                }
            }
            LoopKind::SphereLongitude { .. } => {}
            LoopKind::PolygonPlane { vertices } => {
                if vertices.len() < 3 {
                    return Err(ModelError::InvalidParameter(
                        "polygon needs at least 3 vertices".into(),
                    ));
                }
            }
        }
        Ok(Self { kind, samples })
    }

    pub fn circle(center: C64, radius: f64, winding: i32, samples: usize) -> Self {
        Self::new(LoopKind::CirclePlane { center, radius, winding }, samples).unwrap()
    }

    pub fn equator(winding: i32, samples: usize) -> Self {
        Self::new(LoopKind::SphereLatitude { theta0: PI / 2.0, winding }, samples).unwrap()
    }

    pub fn latitude(theta0: f64, winding: i32, samples: usize) -> Result<Self, ModelError> {
        Self::new(LoopKind::SphereLatitude { theta0, winding }, samples)
    }

    pub fn longitude(phi0: f64, samples: usize) -> Self {
        Self::new(LoopKind::SphereLongitude { phi0 }, samples).unwrap()
    }

    pub fn polygon(vertices: Vec<C64>, samples: usize) -> Result<Self, ModelError> {
        Self::new(LoopKind::PolygonPlane { vertices }, samples)
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        Self { kind: self.kind.clone(), samples }
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.kind, LoopKind::CirclePlane { .. } | LoopKind::PolygonPlane { .. })
    }

    pub fn is_spherical(&self) -> bool {
        !self.is_planar()
    }

    /// Point in the complex plane for planar loops.
    pub fn plane_point(&self, t: f64) -> Option<C64> {
        match &self.kind {
            LoopKind::CirclePlane { center, radius, winding } => {
                let phase = 2.0 * PI * (*winding as f64) * t;
                Some(center + C64::from_polar(*radius, phase))
            }
            LoopKind::PolygonPlane { vertices } => {
                let (a, b, frac) = polygon_edge(vertices, t);
                Some(a + (b - a) * frac)
            }
            _ => None,
        }
    }

    /// Velocity `dz/dt` for planar loops.
    pub fn plane_velocity(&self, t: f64) -> Option<C64> {
        match &self.kind {
            LoopKind::CirclePlane { radius, winding, .. } => {
                let w = *winding as f64;
                let phase = 2.0 * PI * w * t;
                Some(C64::new(0.0, 2.0 * PI * w) * C64::from_polar(*radius, phase))
            }
            LoopKind::PolygonPlane { vertices } => {
                let m = vertices.len() as f64;
                let (a, b, _) = polygon_edge(vertices, t);
                Some((b - a) * m)
            }
            _ => None,
        }
    }

    /// Spherical angles `(θ, φ)` for spherical loops.
    pub fn sphere_angles(&self, t: f64) -> Option<(f64, f64)> {
        match &self.kind {
            LoopKind::SphereLatitude { theta0, winding } => {
                Some((*theta0, 2.0 * PI * (*winding as f64) * t))
            }
            LoopKind::SphereLongitude { phi0 } => Some((2.0 * PI * t, *phi0)),
            _ => None,
        }
    }

    /// Angular rates `(dθ/dt, dφ/dt)` for spherical loops.
    pub fn sphere_rates(&self) -> Option<(f64, f64)> {
        match &self.kind {
            LoopKind::SphereLatitude { winding, .. } => {
                Some((0.0, 2.0 * PI * (*winding as f64)))
            }
            LoopKind::SphereLongitude { .. } => Some((2.0 * PI, 0.0)),
            _ => None,
        }
    }

    /// Signed enclosed area for planar loops, positive for counterclockwise
    /// traversal.
    pub fn signed_area(&self) -> Option<f64> {
        match &self.kind {
            LoopKind::CirclePlane { radius, winding, .. } => {
                Some((*winding as f64) * PI * radius * radius)
            }
            LoopKind::PolygonPlane { vertices } => {
                let mut acc = 0.0;
                let m = vertices.len();
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    acc += (a.conj() * b).im;
                }
                Some(0.5 * acc)
            }
            _ => None,
        }
    }

    /// Azimuthal winding for spherical loops.
    pub fn sphere_winding(&self) -> Option<i32> {
        match &self.kind {
            LoopKind::SphereLatitude { winding, .. } => Some(*winding),
            LoopKind::SphereLongitude { .. } => Some(1),
            _ => None,
        }
    }

    /// True for the great circles where the spin-model path ordering is
    /// exactly solvable: the equator and circles of longitude.
    pub fn is_great_circle(&self) -> bool {
        match &self.kind {
            LoopKind::SphereLatitude { theta0, .. } => (theta0 - PI / 2.0).abs() < 1e-12,
            LoopKind::SphereLongitude { .. } => true,
            _ => false,
        }
    }

    /// Reverse the traversal direction.
    pub fn reversed(&self) -> Self {
        let kind = match &self.kind {
            LoopKind::CirclePlane { center, radius, winding } => LoopKind::CirclePlane {
                center: *center,
                radius: *radius,
                winding: -winding,
            },
            LoopKind::SphereLatitude { theta0, winding } => {
                LoopKind::SphereLatitude { theta0: *theta0, winding: -winding }
            }
            LoopKind::SphereLongitude { phi0 } => {
                // Reversing the great circle flips the azimuth by π.
                LoopKind::SphereLongitude { phi0: phi0 + PI }
            }
            LoopKind::PolygonPlane { vertices } => {
                let mut v = vertices.clone();
                v.reverse();
                LoopKind::PolygonPlane { vertices: v }
            }
        };
        Self { kind, samples: self.samples }
    }

    /// Furthest distance of the loop from the origin, used for truncation
    /// sizing of the Fock space.
    pub fn plane_extent(&self) -> Option<(C64, f64)> {
        match &self.kind {
            LoopKind::CirclePlane { center, radius, .. } => Some((*center, *radius)),
            LoopKind::PolygonPlane { vertices } => {
                let n = vertices.len() as f64;
                let centroid = vertices.iter().sum::<C64>() / n;
                let radius = vertices
                    .iter()
                    .map(|v| (v - centroid).norm())
                    .fold(0.0, f64::max);
                Some((centroid, radius))
            }
            _ => None,
        }
    }
}

fn polygon_edge(vertices: &[C64], t: f64) -> (C64, C64, f64) {
    let m = vertices.len();
    let scaled = t.rem_euclid(1.0) * m as f64;
    let idx = (scaled.floor() as usize).min(m - 1);
    let frac = scaled - idx as f64;
    (vertices[idx], vertices[(idx + 1) % m], frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn circle_is_closed_and_counterclockwise() {
        let l = ParameterLoop::circle(c(0.3, -0.1), 0.5, 1, 64);
        let z0 = l.plane_point(0.0).unwrap();
        let z1 = l.plane_point(1.0).unwrap();
        assert!((z0 - z1).norm() < 1e-12);
        assert!((l.signed_area().unwrap() - PI * 0.25).abs() < 1e-14);
        // Quarter turn moves counterclockwise.
        let zq = l.plane_point(0.25).unwrap();
        assert!((zq - (c(0.3, -0.1) + c(0.0, 0.5))).norm() < 1e-12);
    }

    #[test]
    fn winding_scales_area_and_flips_sign() {
        let l = ParameterLoop::circle(c(0.0, 0.0), 1.0, -2, 64);
        assert!((l.signed_area().unwrap() + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn polygon_shoelace_area() {
        // Unit square, counterclockwise: area 1.
        let l = ParameterLoop::polygon(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)],
            64,
        )
        .unwrap();
        assert!((l.signed_area().unwrap() - 1.0).abs() < 1e-14);
        // Clockwise flips the sign.
        assert!((l.reversed().signed_area().unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn polygon_point_and_velocity_are_consistent() {
        let l = ParameterLoop::polygon(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)], 96).unwrap();
        let h = 1e-7;
        for &t in &[0.1, 0.4, 0.9] {
            let fd = (l.plane_point(t + h).unwrap() - l.plane_point(t - h).unwrap()) / (2.0 * h);
            let v = l.plane_velocity(t).unwrap();
            assert!((fd - v).norm() < 1e-5);
        }
    }

    #[test]
    fn sample_floor_enforced() {
        assert!(ParameterLoop::new(
            LoopKind::CirclePlane { center: c(0.0, 0.0), radius: 1.0, winding: 1 },
            4
        )
        .is_err());
    }

    #[test]
    fn great_circle_detection() {
        assert!(ParameterLoop::equator(1, 64).is_great_circle());
        assert!(ParameterLoop::longitude(0.3, 64).is_great_circle());
        assert!(!ParameterLoop::latitude(PI / 3.0, 1, 64).unwrap().is_great_circle());
    }
}
