//! Pressure Poisson problems with Neumann data and the modified boundary
//! datum N[u] on the inflow wall.

pub mod poisson;

use crate::fields::{ops, PlaneField, ScalarField, TangentPlane, VectorField};
use crate::geometry::calculus::{PatchGrid, PatchTangent};
use crate::geometry::{Wall, WallCalculus};
use poisson::{neumann_gradient, solve_neumann};

/// (u·∇u)·n on a wall from the volume difference operators.
pub fn convective_normal(u: &VectorField, wall: Wall) -> PlaneField {
    let a = ops::advect(u, u);
    a.normal(wall)
}

/// u^τ·∇_Γ u^n − u^n div_Γ u^τ − (κ₁+κ₂)(u^n)² − u^τ·𝒜u^τ on a patch.
pub fn normal_convection_patch(pg: &PatchGrid, u_tau: &PatchTangent, un: &[f64]) -> Vec<f64> {
    let grad = pg.grad(un);
    let div = pg.div(u_tau);
    let shape = pg.shape_apply(u_tau);
    (0..pg.len())
        .map(|p| {
            let k = pg.k1[p] + pg.k2[p];
            u_tau.v1[p] * grad.v1[p] + u_tau.v2[p] * grad.v2[p] - un[p] * div[p] - k * un[p] * un[p]
                - (u_tau.v1[p] * shape.v1[p] + u_tau.v2[p] * shape.v2[p])
        })
        .collect()
}

/// Inflow form 2u^τ·∇_Γ U^n − div_Γ(U^n 𝒰^τ) − (κ₁+κ₂)(U^n)² − u^τ·𝒜u^τ on a patch.
pub fn inflow_datum_patch(pg: &PatchGrid, u_tau: &PatchTangent, un: &[f64], bg_tau: &PatchTangent) -> Vec<f64> {
    let grad = pg.grad(un);
    let flux = PatchTangent {
        v1: bg_tau.v1.iter().zip(un).map(|(a, b)| a * b).collect(),
        v2: bg_tau.v2.iter().zip(un).map(|(a, b)| a * b).collect(),
    };
    let div = pg.div(&flux);
    let shape = pg.shape_apply(u_tau);
    (0..pg.len())
        .map(|p| {
            let k = pg.k1[p] + pg.k2[p];
            2.0 * (u_tau.v1[p] * grad.v1[p] + u_tau.v2[p] * grad.v2[p]) - div[p] - k * un[p] * un[p]
                - (u_tau.v1[p] * shape.v1[p] + u_tau.v2[p] * shape.v2[p])
        })
        .collect()
}

/// Time derivative of `normal_convection_patch` along (u̇^τ, u̇^n).
pub fn normal_convection_dt_patch(pg: &PatchGrid, u_tau: &PatchTangent, u_tau_dt: &PatchTangent, un: &[f64], un_dt: &[f64]) -> Vec<f64> {
    let grad = pg.grad(un);
    let grad_dt = pg.grad(un_dt);
    let div = pg.div(u_tau);
    let div_dt = pg.div(u_tau_dt);
    let shape = pg.shape_apply(u_tau);
    (0..pg.len())
        .map(|p| {
            let k = pg.k1[p] + pg.k2[p];
            u_tau_dt.v1[p] * grad.v1[p] + u_tau_dt.v2[p] * grad.v2[p] + u_tau.v1[p] * grad_dt.v1[p] + u_tau.v2[p] * grad_dt.v2[p]
                - un_dt[p] * div[p]
                - un[p] * div_dt[p]
                - 2.0 * k * un[p] * un_dt[p]
                - 2.0 * (u_tau_dt.v1[p] * shape.v1[p] + u_tau_dt.v2[p] * shape.v2[p])
        })
        .collect()
}

/// Time derivative of `inflow_datum_patch` along (u̇^τ, U̇^n, 𝒰̇^τ).
pub fn inflow_datum_dt_patch(
    pg: &PatchGrid,
    u_tau: &PatchTangent,
    u_tau_dt: &PatchTangent,
    un: &[f64],
    un_dt: &[f64],
    bg_tau: &PatchTangent,
    bg_tau_dt: &PatchTangent,
) -> Vec<f64> {
    let grad = pg.grad(un);
    let grad_dt = pg.grad(un_dt);
    let n = pg.len();
    let flux = PatchTangent {
        v1: (0..n).map(|p| un_dt[p] * bg_tau.v1[p] + un[p] * bg_tau_dt.v1[p]).collect(),
        v2: (0..n).map(|p| un_dt[p] * bg_tau.v2[p] + un[p] * bg_tau_dt.v2[p]).collect(),
    };
    let div = pg.div(&flux);
    let shape = pg.shape_apply(u_tau);
    (0..n)
        .map(|p| {
            let k = pg.k1[p] + pg.k2[p];
            2.0 * (u_tau_dt.v1[p] * grad.v1[p] + u_tau_dt.v2[p] * grad.v2[p] + u_tau.v1[p] * grad_dt.v1[p] + u_tau.v2[p] * grad_dt.v2[p])
                - div[p]
                - 2.0 * k * un[p] * un_dt[p]
                - 2.0 * (u_tau_dt.v1[p] * shape.v1[p] + u_tau_dt.v2[p] * shape.v2[p])
        })
        .collect()
}

pub fn patch_tangent(v: &TangentPlane) -> PatchTangent {
    PatchTangent { v1: v.x.clone(), v2: v.y.clone() }
}

/// Background traces on the inflow wall entering N[u].
#[derive(Clone, Copy, Debug)]
pub struct InflowTrace<'a> {
    /// U^n with the outward normal.
    pub un: &'a PlaneField,
    pub bg_tau: &'a TangentPlane,
}

/// N[u] on the top and bottom walls. Without inflow traces both walls use (u·∇u)·n.
pub fn nonlinear_neumann(wc: &WallCalculus, u: &VectorField, inflow: Option<InflowTrace>) -> [PlaneField; 2] {
    let g = u.grid.plane();
    let mut out = [PlaneField::zeros(g), PlaneField::zeros(g)];
    for (slot, wall) in [(0, Wall::Top), (1, Wall::Bottom)] {
        let ut = patch_tangent(&u.tangential(wall));
        let data = match (wall, inflow) {
            (Wall::Top, Some(tr)) => inflow_datum_patch(wc.patch(), &ut, &tr.un.data, &patch_tangent(tr.bg_tau)),
            _ => normal_convection_patch(wc.patch(), &ut, &u.normal(wall).data),
        };
        out[slot] = PlaneField { grid: g, data };
    }
    out
}

/// −∂_j u_i ∂_i u_j.
pub fn pressure_source(u: &VectorField) -> ScalarField {
    let gt = ops::grad_tensor(u);
    let n = u.grid.len();
    let data = (0..n)
        .map(|p| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += gt[3 * i + j][p] * gt[3 * j + i][p];
                }
            }
            -s
        })
        .collect();
    ScalarField { grid: u.grid, data }
}

/// A pressure field with the Neumann data it was solved with.
#[derive(Clone, Debug)]
pub struct PressureSolution {
    pub q: ScalarField,
    pub top: PlaneField,
    pub bottom: PlaneField,
    pub defect: f64,
}

impl PressureSolution {
    /// Gradient whose wall-normal component equals the Neumann datum.
    pub fn gradient(&self) -> VectorField {
        neumann_gradient(&self.q, &self.top, &self.bottom)
    }
    pub fn trace(&self, wall: Wall) -> PlaneField {
        self.q.wall(wall)
    }
}

fn solve_with(u: &VectorField, top: PlaneField, bottom: PlaneField) -> PressureSolution {
    let s = solve_neumann(&pressure_source(u), &top, &bottom);
    PressureSolution { q: s.q, top, bottom, defect: s.defect }
}

/// The approximating pressure: Δq = −∇u:∇uᵀ, ∂q/∂n = −∂tU^n − N[u].
pub fn solve_q(wc: &WallCalculus, u: &VectorField, inflow: Option<InflowTrace>, dt_un: [&PlaneField; 2]) -> PressureSolution {
    let [nt, nb] = nonlinear_neumann(wc, u, inflow);
    let top = nt.zip_with(dt_un[0], |n, d| -d - n);
    let bottom = nb.zip_with(dt_un[1], |n, d| -d - n);
    solve_with(u, top, bottom)
}

/// The true pressure: ∂p/∂n = −∂t(u·n) − (u·∇u)·n.
pub fn solve_true_pressure(u: &VectorField, dt_un: [&PlaneField; 2]) -> PressureSolution {
    let top = convective_normal(u, Wall::Top).zip_with(dt_un[0], |n, d| -d - n);
    let bottom = convective_normal(u, Wall::Bottom).zip_with(dt_un[1], |n, d| -d - n);
    solve_with(u, top, bottom)
}

/// The pressure of the initial data used by the compatibility conditions.
pub fn solve_pu(u0: &VectorField, dt_un0: [&PlaneField; 2]) -> PressureSolution {
    solve_true_pressure(u0, dt_un0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid3;
    use crate::geometry::SurfacePatch;
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(16, 8, 17, 1.0, 1.0).unwrap()
    }

    #[test]
    fn uniform_downflow_has_zero_datum_and_pressure() {
        let g = grid();
        let wc = WallCalculus::new(g.plane());
        let u = VectorField::constant(g, [0.0, 0.0, -1.0]);
        let un = u.normal(Wall::Top);
        let zero_tau = TangentPlane::zeros(g.plane());
        let tr = InflowTrace { un: &un, bg_tau: &zero_tau };
        let [nt, nb] = nonlinear_neumann(&wc, &u, Some(tr));
        assert_eq!(nt.max_abs(), 0.0);
        assert_eq!(nb.max_abs(), 0.0);
        let z = PlaneField::zeros(g.plane());
        assert_eq!(solve_q(&wc, &u, Some(tr), [&z, &z]).q.max_abs(), 0.0);
        assert_eq!(solve_true_pressure(&u, [&z, &z]).q.max_abs(), 0.0);
    }

    #[test]
    fn tangential_wave_on_inflow_wall_gives_zero_datum() {
        let g = grid();
        let wc = WallCalculus::new(g.plane());
        let u = VectorField::from_fn(g, |x| [(2.0 * PI * x[0]).sin(), 0.0, -1.0]);
        let un = PlaneField::constant(g.plane(), -1.0);
        let zero_tau = TangentPlane::zeros(g.plane());
        let [nt, _] = nonlinear_neumann(&wc, &u, Some(InflowTrace { un: &un, bg_tau: &zero_tau }));
        assert_eq!(nt.max_abs(), 0.0);
    }

    #[test]
    fn shear_flow_pressure_vanishes() {
        let g = grid();
        let u = VectorField::from_fn(g, |x| [x[2], 0.0, 0.0]);
        assert!(pressure_source(&u).max_abs() < 1e-14);
        let z = PlaneField::zeros(g.plane());
        let p = solve_true_pressure(&u, [&z, &z]);
        assert!(p.q.max_abs() < 1e-13);
    }

    #[test]
    fn cylinder_curvature_terms() {
        let pg = PatchGrid::new(SurfacePatch::Cylinder { radius: 1.0, length: 1.0 }, 8, 8).unwrap();
        let n = pg.len();
        let ut = PatchTangent { v1: vec![1.0; n], v2: vec![0.0; n] };
        let un = vec![-1.0; n];
        let zero = PatchTangent::zeros(n);
        let d = inflow_datum_patch(&pg, &ut, &un, &zero);
        assert!(d.iter().all(|v| (v + 2.0).abs() < 1e-12));
    }

    #[test]
    fn flat_form_equals_volume_convection_for_divergence_free_fields() {
        let g = grid();
        let wc = WallCalculus::new(g.plane());
        let omega = VectorField::from_fn(g, |x| {
            let k = 2.0 * PI;
            [(k * x[1]).sin() * x[2], (k * x[0]).cos() * (1.0 - x[2]), (k * (x[0] + x[1])).sin()]
        });
        // any discretely divergence-free field with nonzero normal trace
        let mut u = crate::recovery::biot_savart(&omega);
        u.c[2].iter_mut().for_each(|v| *v -= 1.0);
        let [nt, nb] = nonlinear_neumann(&wc, &u, None);
        for (wall, n) in [(Wall::Top, nt), (Wall::Bottom, nb)] {
            let c = convective_normal(&u, wall);
            let e = c.zip_with(&n, |a, b| a - b).max_abs();
            assert!(e < 1e-10, "{wall:?} {e}");
        }
    }
}
