use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Orthonormal right-handed frame (τ₁, τ₂, n) at a surface point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub t1: [f64; 3],
    pub t2: [f64; 3],
    pub n: [f64; 3],
}

/// Analytic single-chart boundary patches in principal-curvature coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfacePatch {
    /// Plane z = height with normal +e_z, periodic in both directions.
    FlatPeriodic { l1: f64, l2: f64, height: f64 },
    /// Sphere band θ ∈ [theta_min, theta_max], φ periodic; normal points away from the center.
    Sphere { radius: f64, theta_min: f64, theta_max: f64 },
    /// Cylinder around the z-axis, periodic in angle and in axial length; normal points away from the axis.
    Cylinder { radius: f64, length: f64 },
}

impl SurfacePatch {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let ok = match *self {
            SurfacePatch::FlatPeriodic { l1, l2, .. } => l1 > 0.0 && l2 > 0.0,
            SurfacePatch::Sphere { radius, theta_min, theta_max } => {
                radius > 0.0 && 0.0 < theta_min && theta_min < theta_max && theta_max < PI
            }
            SurfacePatch::Cylinder { radius, length } => radius > 0.0 && length > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidPatch(format!("{self:?}")))
        }
    }

    /// Parameter ranges; periodic directions are half-open.
    pub fn ranges(&self) -> [(f64, f64); 2] {
        match *self {
            SurfacePatch::FlatPeriodic { l1, l2, .. } => [(0.0, l1), (0.0, l2)],
            SurfacePatch::Sphere { theta_min, theta_max, .. } => [(theta_min, theta_max), (0.0, 2.0 * PI)],
            SurfacePatch::Cylinder { length, .. } => [(0.0, 2.0 * PI), (0.0, length)],
        }
    }

    pub fn periodic(&self) -> [bool; 2] {
        match self {
            SurfacePatch::FlatPeriodic { .. } | SurfacePatch::Cylinder { .. } => [true, true],
            SurfacePatch::Sphere { .. } => [false, true],
        }
    }

    pub fn point(&self, xi: [f64; 2]) -> [f64; 3] {
        match *self {
            SurfacePatch::FlatPeriodic { height, .. } => [xi[0], xi[1], height],
            SurfacePatch::Sphere { radius: r, .. } => {
                let (st, ct) = xi[0].sin_cos();
                let (sp, cp) = xi[1].sin_cos();
                [r * st * cp, r * st * sp, r * ct]
            }
            SurfacePatch::Cylinder { radius: r, .. } => {
                let (s, c) = xi[0].sin_cos();
                [r * c, r * s, xi[1]]
            }
        }
    }

    /// Metric factors a₁, a₂ (lengths of the coordinate tangent vectors).
    pub fn metric(&self, xi: [f64; 2]) -> [f64; 2] {
        match *self {
            SurfacePatch::FlatPeriodic { .. } => [1.0, 1.0],
            SurfacePatch::Sphere { radius: r, .. } => [r, r * xi[0].sin()],
            SurfacePatch::Cylinder { radius: r, .. } => [r, 1.0],
        }
    }

    pub fn frame(&self, xi: [f64; 2]) -> Frame {
        match *self {
            SurfacePatch::FlatPeriodic { .. } => Frame { t1: [1.0, 0.0, 0.0], t2: [0.0, 1.0, 0.0], n: [0.0, 0.0, 1.0] },
            SurfacePatch::Sphere { .. } => {
                let (st, ct) = xi[0].sin_cos();
                let (sp, cp) = xi[1].sin_cos();
                Frame { t1: [ct * cp, ct * sp, -st], t2: [-sp, cp, 0.0], n: [st * cp, st * sp, ct] }
            }
            SurfacePatch::Cylinder { .. } => {
                let (s, c) = xi[0].sin_cos();
                Frame { t1: [-s, c, 0.0], t2: [0.0, 0.0, 1.0], n: [c, s, 0.0] }
            }
        }
    }

    /// Principal curvatures along τ₁ and τ₂ for the outward normal.
    pub fn curvatures(&self, _xi: [f64; 2]) -> [f64; 2] {
        match *self {
            SurfacePatch::FlatPeriodic { .. } => [0.0, 0.0],
            SurfacePatch::Sphere { radius: r, .. } => [1.0 / r, 1.0 / r],
            SurfacePatch::Cylinder { radius: r, .. } => [1.0 / r, 0.0],
        }
    }
}
