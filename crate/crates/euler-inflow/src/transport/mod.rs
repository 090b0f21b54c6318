//! Linear vorticity transport by the frozen velocity, and a-posteriori checks
//! of the transported field.

pub mod lagrangian;

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::fields::{ops, volume_integral, Grid3, SpaceTimeVelocity, VectorField};
use crate::geometry::Wall;
pub use lagrangian::{lagrangian_solve, TransportProblem, VorticityField};

/// One member of the test bank: e_c T(t) Z(z) X(x, y).
#[derive(Clone, Copy, Debug)]
struct TestFunction {
    comp: usize,
    /// Time profile: sin²(πt/T) times cos(2πt/T)^tp.
    tp: i32,
    /// z profile: sin⁴(πz) times cos(2πz)^zp.
    zp: i32,
    /// Plane wave numbers and phase (0 cos, 1 sin).
    a: f64,
    b: f64,
    phase: usize,
}

fn test_bank() -> Vec<TestFunction> {
    let mut bank = Vec::new();
    let waves = [(0.0, 0.0, 0), (1.0, 0.0, 0), (1.0, 0.0, 1), (0.0, 1.0, 0), (0.0, 1.0, 1), (1.0, 1.0, 0), (1.0, 1.0, 1)];
    for comp in 0..3 {
        for tp in 0..2 {
            for zp in 0..2 {
                for &(a, b, phase) in &waves {
                    bank.push(TestFunction { comp, tp, zp, a, b, phase });
                }
            }
        }
    }
    bank
}

impl TestFunction {
    fn time(&self, t: f64, tf: f64) -> (f64, f64) {
        let w = PI / tf;
        let (s, c) = (w * t).sin_cos();
        let base = s * s;
        let dbase = 2.0 * s * c * w;
        if self.tp == 0 {
            (base, dbase)
        } else {
            let (s2, c2) = (2.0 * w * t).sin_cos();
            (base * c2, dbase * c2 - 2.0 * w * base * s2)
        }
    }

    /// Value and gradient of Z(z) X(x, y).
    fn space(&self, g: &Grid3, x: [f64; 3]) -> (f64, [f64; 3]) {
        let (s, c) = (PI * x[2]).sin_cos();
        let s4 = s.powi(4);
        let ds4 = 4.0 * s.powi(3) * c * PI;
        let (z, dz) = if self.zp == 0 {
            (s4, ds4)
        } else {
            let (s2, c2) = (2.0 * PI * x[2]).sin_cos();
            (s4 * c2, ds4 * c2 - 2.0 * PI * s4 * s2)
        };
        let kx = 2.0 * PI * self.a / g.l1;
        let ky = 2.0 * PI * self.b / g.l2;
        let arg = kx * x[0] + ky * x[1];
        let (sn, cs) = arg.sin_cos();
        let (xy, dxy) = if self.phase == 0 { (cs, -sn) } else { (sn, cs) };
        (z * xy, [z * dxy * kx, z * dxy * ky, dz * xy])
    }
}

/// max over the test bank of |⟨∂tω + div(ω⊗u) − ω·∇u − g, φ⟩| / ‖φ‖_{L²(Q)},
/// with the derivatives moved onto φ except for ∇u. Trapezoid in time and z;
/// every φ is a trigonometric polynomial that the trapezoid rule integrates exactly.
pub fn weak_residual(omega: &[VectorField], u: &SpaceTimeVelocity, g: &[VectorField]) -> f64 {
    let grid = u.grid;
    let nt = u.nt();
    let dt = u.dt;
    let tf = u.t_final();
    let bank = test_bank();
    // (ω·∇u)_c + g_c per slice
    let sources: Vec<[Vec<f64>; 3]> = (0..=nt)
        .into_par_iter()
        .map(|m| {
            let stretch = ops::advect(&omega[m], &u.slices[m]);
            let add = |c: usize| stretch.c[c].iter().zip(&g[m].c[c]).map(|(a, b)| a + b).collect();
            [add(0), add(1), add(2)]
        })
        .collect();
    let points: Vec<[f64; 3]> = (0..grid.len()).map(|q| grid.point(q)).collect();
    bank.par_iter()
        .map(|phi| {
            let space: Vec<(f64, [f64; 3])> = points.iter().map(|&x| phi.space(&grid, x)).collect();
            let c = phi.comp;
            let mut total = 0.0;
            let mut norm2 = 0.0;
            for m in 0..=nt {
                let tw = if m == 0 || m == nt { 0.5 * dt } else { dt };
                let (tv, dtv) = phi.time(m as f64 * dt, tf);
                if tv == 0.0 && dtv == 0.0 {
                    continue;
                }
                let w = &omega[m].c[c];
                let src = &sources[m][c];
                let vel = &u.slices[m];
                let dens: Vec<f64> = (0..grid.len())
                    .map(|q| {
                        let (v, gr) = space[q];
                        let adv = vel.c[0][q] * gr[0] + vel.c[1][q] * gr[1] + vel.c[2][q] * gr[2];
                        -w[q] * (dtv * v + tv * adv) - tv * src[q] * v
                    })
                    .collect();
                total += tw * volume_integral(&grid, &dens);
                let sq: Vec<f64> = space.iter().map(|(v, _)| (tv * v).powi(2)).collect();
                norm2 += tw * volume_integral(&grid, &sq);
            }
            total.abs() / norm2.sqrt().max(1e-300)
        })
        .reduce(|| 0.0, f64::max)
}

/// Range-of-curl diagnostics per slice.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RangeReport {
    pub div: Vec<f64>,
    pub flux_top: Vec<f64>,
    pub flux_bottom: Vec<f64>,
    pub tol: f64,
}

impl RangeReport {
    pub fn passes(&self) -> bool {
        self.first_failure().is_none()
    }
    pub fn first_failure(&self) -> Option<usize> {
        (0..self.div.len()).find(|&m| self.div[m] > self.tol || self.flux_top[m].abs() > self.tol || self.flux_bottom[m].abs() > self.tol)
    }
    pub fn worst(&self) -> f64 {
        self.div.iter().chain(&self.flux_top).chain(&self.flux_bottom).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// ‖div ω‖_∞ and the fluxes ∫ ω·n through both walls, per slice.
pub fn range_of_curl_check(omega: &[VectorField], tol: f64) -> RangeReport {
    let rows: Vec<(f64, f64, f64)> = omega
        .par_iter()
        .map(|w| {
            let d = ops::divergence(w).max_abs();
            (d, w.normal(Wall::Top).integral(), w.normal(Wall::Bottom).integral())
        })
        .collect();
    RangeReport {
        div: rows.iter().map(|r| r.0).collect(),
        flux_top: rows.iter().map(|r| r.1).collect(),
        flux_bottom: rows.iter().map(|r| r.2).collect(),
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::interp::PlaneSeries;
    use crate::flow_map::{TraceOptions, VelocityHistory};

    fn grid() -> Grid3 {
        Grid3::new(16, 8, 17, 1.0, 1.0).unwrap()
    }

    #[test]
    fn curl_fields_are_in_range() {
        let g = grid();
        let v = VectorField::from_fn(g, |x| {
            let k = 2.0 * PI;
            [(k * x[1]).sin() * x[2] * x[2], (k * x[0]).cos() * (PI * x[2]).sin(), (k * (x[0] + x[1])).cos() * x[2]]
        });
        let rep = range_of_curl_check(&[ops::curl3(&v)], 1e-9);
        assert!(rep.passes(), "{rep:?}");
        let bad = VectorField::from_fn(g, |x| [0.0, 0.0, x[2]]);
        let rep = range_of_curl_check(&[bad], 1e-9);
        assert!(!rep.passes());
        assert!((rep.div[0] - 1.0).abs() < 1e-12);
    }

    fn constant_run(nt: usize, dt: f64) -> (Vec<VectorField>, SpaceTimeVelocity) {
        let g = grid();
        let u = SpaceTimeVelocity::constant(&VectorField::constant(g, [0.1, 0.0, -1.0]), nt, dt);
        let h = VelocityHistory::new(&u, None);
        let c = [0.3, 0.2, 0.0];
        let w0 = VectorField::constant(g, c);
        let g2 = g.plane();
        let hs = PlaneSeries::new(g2, dt, vec![vec![c; g2.len()]; nt + 1]);
        let p = TransportProblem { history: &h, omega0: &w0, inflow: Some(&hs), opts: TraceOptions::for_history(&h) };
        (lagrangian_solve(&p).unwrap().slices, u)
    }

    #[test]
    fn residual_vanishes_for_constant_data_and_detects_perturbation() {
        let (nt, dt) = (8, 0.0625);
        let (w, u) = constant_run(nt, dt);
        let zero = vec![VectorField::zeros(grid()); nt + 1];
        let r = weak_residual(&w, &u, &zero);
        assert!(r < 1e-8, "{r}");
        let tf = nt as f64 * dt;
        let pert: Vec<VectorField> = w
            .iter()
            .enumerate()
            .map(|(m, s)| {
                let mut p = s.clone();
                p.add_constant([0.1 * (2.0 * PI * m as f64 * dt / tf).sin(), 0.0, 0.0]);
                p
            })
            .collect();
        assert!(weak_residual(&pert, &u, &zero) > 1e-2);
    }
}
