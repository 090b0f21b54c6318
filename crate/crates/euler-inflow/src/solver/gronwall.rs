//! Energy inequality for the difference of two solutions with the same data.

use serde::Serialize;

use crate::fields::spacetime::time_stencil;
use crate::fields::{ops, volume_integral, SpaceTimeVelocity};
use crate::geometry::Wall;

#[derive(Clone, Debug, Default, Serialize)]
pub struct GronwallReport {
    /// ‖w(t_m)‖²_{L²}.
    pub energy: Vec<f64>,
    /// d/dt ‖w‖² by the time stencil.
    pub energy_rate: Vec<f64>,
    /// 2‖∇u₂‖_∞ ‖w‖².
    pub stretching: Vec<f64>,
    /// −∫_Γ (u₁·n)|w|², nonpositive on the outflow wall.
    pub boundary: Vec<f64>,
    /// Largest rate − bound, relative to the bound's magnitude.
    pub worst_excess: f64,
    pub floor: f64,
    pub l2_final: f64,
    pub holds: bool,
}

/// Check d/dt‖w‖² ≤ 2‖∇u₂‖_∞‖w‖² − ∫_Γ (u₁·n)|w|² slice by slice, w = u₁ − u₂.
/// A slice passes when the excess is within `rel` of the right-hand side's magnitude plus `floor`.
pub fn gronwall_uniqueness_check(u1: &SpaceTimeVelocity, u2: &SpaceTimeVelocity, rel: f64, floor: f64) -> GronwallReport {
    let g = u1.grid;
    let nt = u1.nt();
    let w = u1.sub(u2);
    let energy: Vec<f64> = w
        .slices
        .iter()
        .map(|s| volume_integral(&g, &(0..g.len()).map(|p| s.at(p).iter().map(|v| v * v).sum()).collect::<Vec<f64>>()))
        .collect();
    let energy_rate: Vec<f64> = (0..=nt)
        .map(|m| if nt == 0 { 0.0 } else { time_stencil(nt, m).iter().map(|&(s, c)| c * energy[s] / u1.dt).sum() })
        .collect();
    let stretching: Vec<f64> = (0..=nt).map(|m| 2.0 * ops::grad_sup_norm(&ops::grad_tensor(&u2.slices[m])) * energy[m]).collect();
    let boundary: Vec<f64> = (0..=nt)
        .map(|m| {
            let mut b = 0.0;
            for wall in [Wall::Top, Wall::Bottom] {
                let un = u1.slices[m].normal(wall);
                let k = wall.k(&g);
                let np = g.plane_len();
                let sq: Vec<f64> = (0..np).map(|p| w.slices[m].at(k * np + p).iter().map(|v| v * v).sum()).collect();
                b -= un.zip_with(&crate::fields::PlaneField { grid: g.plane(), data: sq }, |a, s| a * s).integral();
            }
            b
        })
        .collect();
    let mut worst_excess: f64 = 0.0;
    let mut holds = true;
    for m in 0..=nt {
        let rhs = stretching[m] + boundary[m];
        let excess = energy_rate[m] - rhs;
        let scale = stretching[m] + boundary[m].abs();
        if excess > rel * scale + floor {
            holds = false;
        }
        if scale > 0.0 {
            worst_excess = worst_excess.max(excess / scale);
        }
    }
    GronwallReport { l2_final: energy[nt].sqrt(), energy, energy_rate, stretching, boundary, worst_excess, floor, holds }
}
