//! Vorticity generated on the inflow wall, the boundary vorticity of an
//! exact solution, the range-of-curl constraint on prescribed boundary
//! vorticity, and the compatibility conditions at t = 0.

pub mod compat;

use rayon::prelude::*;

use crate::error::ConfigError;
use crate::fields::interp::PlaneSeries;
use crate::fields::spacetime::time_stencil;
use crate::fields::{PlaneField, ScalarField, TangentPlane, VectorField};
use crate::geometry::{Wall, WallCalculus};
use crate::recovery::Background;

/// H on Γ₊ at one time, split into tangential and normal parts (normal = +e_z).
#[derive(Clone, Debug, PartialEq)]
pub struct InflowVorticity {
    pub tangential: TangentPlane,
    pub normal: PlaneField,
}

impl InflowVorticity {
    pub fn zeros(g: crate::fields::Grid2) -> Self {
        Self { tangential: TangentPlane::zeros(g), normal: PlaneField::zeros(g) }
    }
    /// Cartesian (x, y, z) samples per plane node.
    pub fn cartesian(&self) -> Vec<[f64; 3]> {
        (0..self.normal.data.len()).map(|p| [self.tangential.x[p], self.tangential.y[p], self.normal.data[p]]).collect()
    }
    pub fn max_abs(&self) -> f64 {
        self.tangential.max_norm().max(self.normal.max_abs())
    }
}

/// H slices as a time series sampled by the transport solver.
pub fn inflow_series(h: &[InflowVorticity], dt: f64) -> PlaneSeries<3> {
    PlaneSeries::new(h[0].normal.grid, dt, h.iter().map(|s| s.cartesian()).collect())
}

/// Background traces on Γ₊ at one slice.
#[derive(Clone, Debug)]
pub struct InflowTraces {
    /// U^n (outward, negative on inflow).
    pub un: PlaneField,
    /// 𝒰^τ.
    pub tau: TangentPlane,
    /// ∂t𝒰^τ.
    pub tau_dt: TangentPlane,
}

impl InflowTraces {
    /// Traces at slice m, with ∂t𝒰^τ from the background's configured time derivative.
    pub fn at_slice(bg: &Background, m: usize) -> Self {
        let t = m as f64 * bg.dt;
        Self { un: bg.normal(Wall::Top, t), tau: bg.inflow_tangential(t), tau_dt: bg.inflow_tangential_dt(m) }
    }
    /// Traces at time t with the analytic ∂t𝒰^τ.
    pub fn at_time(bg: &Background, t: f64) -> Self {
        Self { un: bg.normal(Wall::Top, t), tau: bg.inflow_tangential(t), tau_dt: bg.tangential_derivative(t, 1) }
    }
}

/// Reject inflow speeds below the floor.
pub fn check_inflow_floor(un: &PlaneField, floor: f64) -> Result<(), ConfigError> {
    let found = un.max();
    if found > -floor {
        return Err(ConfigError::InflowFloor { found: -found, floor });
    }
    Ok(())
}

/// (1/U^n)[−∂t v^τ − ∇_Γ(π + ½|v|²) + f^τ]^⊥ + (1/U^n) curl_Γ(v^τ) u^τ and curl_Γ v^τ,
/// where v^τ is the velocity whose derivatives enter.
fn boundary_vorticity(wc: &WallCalculus, v_tau: &TangentPlane, v_tau_dt: &TangentPlane, pi: &PlaneField, un: &PlaneField, u_tau: &TangentPlane, f_tau: &TangentPlane) -> InflowVorticity {
    let half_sq = PlaneField {
        grid: un.grid,
        data: (0..un.data.len()).map(|p| pi.data[p] + 0.5 * (v_tau.x[p].powi(2) + v_tau.y[p].powi(2) + un.data[p].powi(2))).collect(),
    };
    let grad = wc.grad(&half_sq);
    let x = TangentPlane {
        grid: un.grid,
        x: (0..un.data.len()).map(|p| -v_tau_dt.x[p] - grad.x[p] + f_tau.x[p]).collect(),
        y: (0..un.data.len()).map(|p| -v_tau_dt.y[p] - grad.y[p] + f_tau.y[p]).collect(),
    };
    let xp = wc.perp(Wall::Top, &x);
    let hn = wc.curl(Wall::Top, v_tau);
    let tangential = TangentPlane {
        grid: un.grid,
        x: (0..un.data.len()).map(|p| (xp.x[p] + hn.data[p] * u_tau.x[p]) / un.data[p]).collect(),
        y: (0..un.data.len()).map(|p| (xp.y[p] + hn.data[p] * u_tau.y[p]) / un.data[p]).collect(),
    };
    InflowVorticity { tangential, normal: hn }
}

/// H from the iterate u, the approximating pressure q and the background traces.
pub fn generate_h(wc: &WallCalculus, u: &VectorField, q: &ScalarField, bg: &InflowTraces, f: &VectorField) -> InflowVorticity {
    boundary_vorticity(wc, &bg.tau, &bg.tau_dt, &q.wall(Wall::Top), &bg.un, &u.tangential(Wall::Top), &f.tangential(Wall::Top))
}

/// W[u, p]: the boundary vorticity of an exact solution, from its own traces.
pub fn w_of_up(wc: &WallCalculus, u: &VectorField, u_tau_dt: &TangentPlane, p: &ScalarField, f: &VectorField) -> InflowVorticity {
    let ut = u.tangential(Wall::Top);
    boundary_vorticity(wc, &ut, u_tau_dt, &p.wall(Wall::Top), &u.normal(Wall::Top), &ut, &f.tangential(Wall::Top))
}

/// ∂tH^n + div_Γ(H^n u^τ − U^n H^τ) − g·n per slice, with ∂tH^n from the time stencil.
pub fn check_constraint(wc: &WallCalculus, h: &[InflowVorticity], u_tau: &[TangentPlane], un: &[PlaneField], g_n: &[PlaneField], dt: f64) -> Vec<PlaneField> {
    let nt = h.len() - 1;
    (0..=nt)
        .into_par_iter()
        .map(|m| {
            let g2 = h[m].normal.grid;
            let mut dthn = PlaneField::zeros(g2);
            if nt >= 1 {
                for (s, w) in time_stencil(nt, m) {
                    for (o, v) in dthn.data.iter_mut().zip(&h[s].normal.data) {
                        *o += w * v / dt;
                    }
                }
            }
            let flux = TangentPlane {
                grid: g2,
                x: (0..g2.len()).map(|p| h[m].normal.data[p] * u_tau[m].x[p] - un[m].data[p] * h[m].tangential.x[p]).collect(),
                y: (0..g2.len()).map(|p| h[m].normal.data[p] * u_tau[m].y[p] - un[m].data[p] * h[m].tangential.y[p]).collect(),
            };
            let div = wc.div(&flux);
            PlaneField { grid: g2, data: (0..g2.len()).map(|p| dthn.data[p] + div.data[p] - g_n[m].data[p]).collect() }
        })
        .collect()
}

/// Prescribed boundary vorticity must have H^n = 0 and div_Γ(U^n H^τ) + g·n = 0 on every slice.
pub fn validate_vorticity_bc(wc: &WallCalculus, h: &[InflowVorticity], un: &[PlaneField], g_n: &[PlaneField], tol: f64) -> Result<f64, ConfigError> {
    let mut worst: f64 = 0.0;
    for (m, s) in h.iter().enumerate() {
        let hn = s.normal.max_abs();
        if hn > tol {
            return Err(ConfigError::ConstraintViolated(format!("normal component {hn:e} at slice {m}")));
        }
        let flux = s.tangential.scaled_by(&un[m]);
        let r = wc.div(&flux).zip_with(&g_n[m], |a, b| a + b).max_abs();
        if r > tol {
            return Err(ConfigError::ConstraintViolated(format!("div(U^n H^τ) + g·n = {r:e} at slice {m}")));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}
