//! The periodic channel: walls, boundary classification and wall calculus.

use serde::{Deserialize, Serialize};

use super::calculus::{PatchGrid, PatchTangent};
use super::patch::SurfacePatch;
use crate::error::ConfigError;
use crate::fields::{Grid2, Grid3, PlaneField, TangentPlane};

/// Top wall z = 1 (outward normal +e_z) or bottom wall z = 0 (normal −e_z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wall {
    Top,
    Bottom,
}

impl Wall {
    pub fn k(self, g: &Grid3) -> usize {
        match self {
            Wall::Top => g.n3 - 1,
            Wall::Bottom => 0,
        }
    }
    pub fn normal_sign(self) -> f64 {
        match self {
            Wall::Top => 1.0,
            Wall::Bottom => -1.0,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Wall::Top => "top wall",
            Wall::Bottom => "bottom wall",
        }
    }
}

/// Role of a boundary component under the configured background flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Inflow,
    Outflow,
    Impermeable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDomain {
    pub l1: f64,
    pub l2: f64,
    pub impermeable: bool,
}

/// Relative tolerance on the net boundary flux.
pub const FLUX_TOL: f64 = 1e-10;

impl ChannelDomain {
    pub fn kind(&self, wall: Wall) -> BoundaryKind {
        match (self.impermeable, wall) {
            (true, _) => BoundaryKind::Impermeable,
            (false, Wall::Top) => BoundaryKind::Inflow,
            (false, Wall::Bottom) => BoundaryKind::Outflow,
        }
    }

    /// Check the sign pattern of the normal velocity and the zero net flux.
    /// `un_top`, `un_bottom` are u·n with the outward normal of each wall.
    pub fn validate_normal_flow(&self, un_top: &PlaneField, un_bottom: &PlaneField) -> Result<(), ConfigError> {
        for (wall, un) in [(Wall::Top, un_top), (Wall::Bottom, un_bottom)] {
            let ok = match self.kind(wall) {
                BoundaryKind::Inflow => un.max() < 0.0,
                BoundaryKind::Outflow => un.min() > 0.0,
                BoundaryKind::Impermeable => un.max_abs() == 0.0,
            };
            if !ok {
                return Err(ConfigError::NormalSign(wall.name()));
            }
        }
        let (a, b) = (un_top.integral(), un_bottom.integral());
        let scale = a.abs().max(b.abs()).max(1e-300);
        if (a + b).abs() > FLUX_TOL * scale {
            return Err(ConfigError::NetFlux(a + b));
        }
        Ok(())
    }
}

/// Surface operators on a channel wall, computed by the general patch
/// calculus on a flat periodic patch.
#[derive(Clone, Debug)]
pub struct WallCalculus {
    patch: PatchGrid,
}

fn to_patch(v: &TangentPlane) -> PatchTangent {
    PatchTangent { v1: v.x.clone(), v2: v.y.clone() }
}

fn from_patch(g: Grid2, v: PatchTangent) -> TangentPlane {
    TangentPlane { grid: g, x: v.v1, y: v.v2 }
}

impl WallCalculus {
    pub fn new(g: Grid2) -> Self {
        let patch = PatchGrid::new(SurfacePatch::FlatPeriodic { l1: g.l1, l2: g.l2, height: 1.0 }, g.n1, g.n2)
            .expect("channel plane satisfies the patch grid limits");
        Self { patch }
    }

    pub fn patch(&self) -> &PatchGrid {
        &self.patch
    }

    fn grid(&self) -> Grid2 {
        Grid2 { n1: self.patch.m1, n2: self.patch.m2, l1: self.patch.xi1[1] * self.patch.m1 as f64, l2: self.patch.xi2[1] * self.patch.m2 as f64 }
    }

    pub fn grad(&self, f: &PlaneField) -> TangentPlane {
        from_patch(f.grid, self.patch.grad(&f.data))
    }

    pub fn div(&self, v: &TangentPlane) -> PlaneField {
        PlaneField { grid: v.grid, data: self.patch.div(&to_patch(v)) }
    }

    /// n × v for the outward normal of `wall`.
    pub fn perp(&self, wall: Wall, v: &TangentPlane) -> TangentPlane {
        let s = wall.normal_sign();
        TangentPlane { grid: v.grid, x: v.y.iter().map(|a| -s * a).collect(), y: v.x.iter().map(|a| s * a).collect() }
    }

    pub fn curl(&self, wall: Wall, v: &TangentPlane) -> PlaneField {
        let d = self.div(&self.perp(wall, v));
        d.map(|x| -x)
    }

    /// Shape operator of the flat wall: identically zero.
    pub fn shape_apply(&self, v: &TangentPlane) -> TangentPlane {
        from_patch(v.grid, self.patch.shape_apply(&to_patch(v)))
    }

    pub fn integrate(&self, f: &PlaneField) -> f64 {
        self.patch.integrate(&f.data)
    }

    pub fn plane(&self) -> Grid2 {
        self.grid()
    }
}
