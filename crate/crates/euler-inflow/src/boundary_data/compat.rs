//! Compatibility of the initial data with the inflow data at t = 0, in
//! velocity form and in vorticity form, and a recipe that builds the
//! tangential inflow trace so that both conditions hold.

use serde::Serialize;

use super::{generate_h, InflowTraces, InflowVorticity};
use crate::fields::{ops, PlaneField, ScalarField, TangentPlane, VectorField};
use crate::geometry::{Wall, WallCalculus};
use crate::pressure::poisson::solve_neumann;
use crate::pressure::{inflow_datum_dt_patch, normal_convection_dt_patch, patch_tangent, solve_pu, solve_q, InflowTrace, PressureSolution};
use crate::recovery::{Background, RecipeTrace};

/// Initial velocity and forcing with its first time derivative.
#[derive(Clone, Copy, Debug)]
pub struct InitialData<'a> {
    pub u0: &'a VectorField,
    pub f0: &'a VectorField,
    pub f0_dt: &'a VectorField,
}

/// Sup-norm defects of both compatibility conditions on Γ₊.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CompatReport {
    /// |u₀^τ − 𝒰^τ(0)|.
    pub trace: f64,
    pub cond0_velocity: f64,
    /// |H(0) − ω₀|.
    pub cond0_vorticity: f64,
    pub cond1_velocity: f64,
    pub cond1_vorticity: f64,
    /// |p^{u₀} − q(0)| over the volume.
    pub pressure_gap: f64,
    pub u_min: f64,
    pub u_max: f64,
}

impl CompatReport {
    pub fn cond0_passes(&self, tol: f64) -> bool {
        self.trace <= tol && self.cond0_vorticity <= tol
    }
    /// Verdicts of the velocity and vorticity forms of cond₁. The vorticity
    /// tolerance is the velocity tolerance divided by the largest inflow speed.
    pub fn cond1_verdicts(&self, tol: f64) -> (bool, bool) {
        (self.cond1_velocity <= tol, self.cond1_vorticity <= tol / self.u_max)
    }
    /// |D_u| / |D_ω|; lies in [U_min, max|U^n|] when the defect is dominated by ∂t²𝒰^τ(0).
    pub fn cond1_ratio(&self) -> f64 {
        self.cond1_velocity / self.cond1_vorticity.max(1e-300)
    }
    pub fn ratio_in_band(&self, slack: f64) -> bool {
        let r = self.cond1_ratio();
        r >= self.u_min * (1.0 - slack) && r <= self.u_max * (1.0 + slack)
    }
}

/// Pressures and velocity rate at t = 0.
struct InitialState {
    q0: PressureSolution,
    pu: PressureSolution,
    /// ∂t u(0) = −u₀·∇u₀ − ∇p^{u₀} + f(0).
    u_dot: VectorField,
}

fn initial_state(bg: &Background, d: &InitialData) -> InitialState {
    let wc = bg.wall_calculus();
    let un = bg.normal(Wall::Top, 0.0);
    let tau = bg.inflow_tangential(0.0);
    let dt_top = bg.normal_dt_at(Wall::Top, 0.0);
    let dt_bottom = bg.normal_dt_at(Wall::Bottom, 0.0);
    let q0 = solve_q(wc, d.u0, Some(InflowTrace { un: &un, bg_tau: &tau }), [&dt_top, &dt_bottom]);
    let pu = solve_pu(d.u0, [&dt_top, &dt_bottom]);
    let mut u_dot = ops::advect(d.u0, d.u0).scale(-1.0);
    u_dot.axpy(-1.0, &pu.gradient());
    u_dot.axpy(1.0, d.f0);
    InitialState { q0, pu, u_dot }
}

/// ∂t q at t = 0: the time derivative of the pressure problem along u̇.
fn pressure_rate(bg: &Background, u0: &VectorField, u_dot: &VectorField) -> PressureSolution {
    let wc = bg.wall_calculus();
    let pg = wc.patch();
    let g = u0.grid;
    let g2 = g.plane();
    let a = ops::grad_tensor(u0);
    let b = ops::grad_tensor(u_dot);
    let source = ScalarField {
        grid: g,
        data: (0..g.len())
            .map(|p| {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        s += b[3 * i + j][p] * a[3 * j + i][p];
                    }
                }
                -2.0 * s
            })
            .collect(),
    };
    let un = bg.normal(Wall::Top, 0.0);
    let un_dt = bg.normal_dt_at(Wall::Top, 0.0);
    let n_top = inflow_datum_dt_patch(
        pg,
        &patch_tangent(&u0.tangential(Wall::Top)),
        &patch_tangent(&u_dot.tangential(Wall::Top)),
        &un.data,
        &un_dt.data,
        &patch_tangent(&bg.tangential_derivative(0.0, 0)),
        &patch_tangent(&bg.tangential_derivative(0.0, 1)),
    );
    let n_bottom = normal_convection_dt_patch(
        pg,
        &patch_tangent(&u0.tangential(Wall::Bottom)),
        &patch_tangent(&u_dot.tangential(Wall::Bottom)),
        &u0.normal(Wall::Bottom).data,
        &u_dot.normal(Wall::Bottom).data,
    );
    let dtt_top = bg.normal_dtt_at(Wall::Top, 0.0);
    let dtt_bottom = bg.normal_dtt_at(Wall::Bottom, 0.0);
    let top = PlaneField { grid: g2, data: (0..g2.len()).map(|p| -dtt_top.data[p] - n_top[p]).collect() };
    let bottom = PlaneField { grid: g2, data: (0..g2.len()).map(|p| -dtt_bottom.data[p] - n_bottom[p]).collect() };
    let s = solve_neumann(&source, &top, &bottom);
    PressureSolution { q: s.q, top, bottom, defect: s.defect }
}

/// [u̇·∇u₀ + u₀·∇u̇ + ∇q̇ − ḟ]^τ on Γ₊: the time derivative of the momentum terms.
fn momentum_rate_tangential(wc: &WallCalculus, u0: &VectorField, u_dot: &VectorField, q_dot: &ScalarField, f_dot: &VectorField) -> TangentPlane {
    let mut m = ops::advect(u_dot, u0);
    m.axpy(1.0, &ops::advect(u0, u_dot));
    m.axpy(-1.0, f_dot);
    let gq = wc.grad(&q_dot.wall(Wall::Top));
    m.tangential(Wall::Top).combine(1.0, &gq, 1.0)
}

/// ∂tH at t = 0 from differentiating the generation formula.
fn inflow_vorticity_rate(bg: &Background, h0: &InflowVorticity, u0: &VectorField, u_dot: &VectorField, q_dot: &ScalarField, f_dot: &VectorField) -> InflowVorticity {
    let wc = bg.wall_calculus();
    let g2 = bg.grid.plane();
    let n = g2.len();
    let un = bg.normal(Wall::Top, 0.0);
    let un_dt = bg.normal_dt_at(Wall::Top, 0.0);
    let tau = bg.tangential_derivative(0.0, 0);
    let tau_dt = bg.tangential_derivative(0.0, 1);
    let tau_dtt = bg.tangential_derivative(0.0, 2);
    let qt = q_dot.wall(Wall::Top);
    let s = PlaneField {
        grid: g2,
        data: (0..n).map(|p| qt.data[p] + tau.x[p] * tau_dt.x[p] + tau.y[p] * tau_dt.y[p] + un.data[p] * un_dt.data[p]).collect(),
    };
    let grad = wc.grad(&s);
    let ft = f_dot.tangential(Wall::Top);
    let x_dot = TangentPlane {
        grid: g2,
        x: (0..n).map(|p| -tau_dtt.x[p] - grad.x[p] + ft.x[p]).collect(),
        y: (0..n).map(|p| -tau_dtt.y[p] - grad.y[p] + ft.y[p]).collect(),
    };
    let xp = wc.perp(Wall::Top, &x_dot);
    let hn_dot = wc.curl(Wall::Top, &tau_dt);
    let ut = u0.tangential(Wall::Top);
    let udt = u_dot.tangential(Wall::Top);
    let h = &h0.tangential;
    let hn = &h0.normal.data;
    let comp = |hc: &[f64], xc: &[f64], uc: &[f64], udc: &[f64]| -> Vec<f64> {
        (0..n).map(|p| (-un_dt.data[p] * hc[p] + xc[p] + hn_dot.data[p] * uc[p] + hn[p] * udc[p]) / un.data[p]).collect()
    };
    InflowVorticity {
        tangential: TangentPlane { grid: g2, x: comp(&h.x, &xp.x, &ut.x, &udt.x), y: comp(&h.y, &xp.y, &ut.y, &udt.y) },
        normal: hn_dot,
    }
}

fn wall_vector(v: &VectorField) -> InflowVorticity {
    InflowVorticity { tangential: v.tangential(Wall::Top), normal: v.normal(Wall::Top) }
}

fn defect(a: &InflowVorticity, b: &InflowVorticity) -> f64 {
    let t = a.tangential.combine(1.0, &b.tangential, -1.0).max_norm();
    t.max(a.normal.zip_with(&b.normal, |x, y| x - y).max_abs())
}

/// Evaluate cond₀ and cond₁ in both forms.
pub fn check_compat(bg: &Background, d: &InitialData) -> CompatReport {
    let wc = bg.wall_calculus();
    let st = initial_state(bg, d);
    let u0t = d.u0.tangential(Wall::Top);
    let trace = u0t.combine(1.0, &bg.inflow_tangential(0.0), -1.0).max_norm();

    let tau_dt = bg.tangential_derivative(0.0, 1);
    let cond0_velocity = tau_dt.combine(1.0, &st.u_dot.tangential(Wall::Top), -1.0).max_norm();
    let traces = InflowTraces::at_time(bg, 0.0);
    let h0 = generate_h(wc, d.u0, &st.q0.q, &traces, d.f0);
    let omega0 = ops::curl3(d.u0);
    let cond0_vorticity = defect(&h0, &wall_vector(&omega0));

    let q_dot = pressure_rate(bg, d.u0, &st.u_dot);
    let m = momentum_rate_tangential(wc, d.u0, &st.u_dot, &q_dot.q, d.f0_dt);
    let cond1_velocity = bg.tangential_derivative(0.0, 2).combine(1.0, &m, 1.0).max_norm();

    let h_dot = inflow_vorticity_rate(bg, &h0, d.u0, &st.u_dot, &q_dot.q, d.f0_dt);
    // ∂tω(0) = curl ∂tu(0), which equals ω₀·∇u₀ − u₀·∇ω₀ + g(0) for solenoidal u₀
    let cond1_vorticity = defect(&h_dot, &wall_vector(&ops::curl3(&st.u_dot)));

    let gap = st.pu.q.data.iter().zip(&st.q0.q.data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let un = bg.normal(Wall::Top, 0.0);
    CompatReport {
        trace,
        cond0_velocity,
        cond0_vorticity,
        cond1_velocity,
        cond1_vorticity,
        pressure_gap: gap,
        u_min: un.max().abs(),
        u_max: un.min().abs(),
    }
}

/// Choose 𝒰^τ = h0 + t h1 + t²/2 h2 so that cond₀ and cond₁ hold in velocity form
/// for the given initial data. The normal trace of u₀ must already match U^n(0).
pub fn apply_recipe(bg: &mut Background, d: &InitialData) -> RecipeTrace {
    let g2 = bg.grid.plane();
    let h0 = d.u0.tangential(Wall::Top);
    bg.set_recipe(RecipeTrace { h0: h0.clone(), h1: TangentPlane::zeros(g2), h2: TangentPlane::zeros(g2) });
    let st = initial_state(bg, d);
    let h1 = st.u_dot.tangential(Wall::Top);
    bg.set_recipe(RecipeTrace { h0: h0.clone(), h1: h1.clone(), h2: TangentPlane::zeros(g2) });
    let q_dot = pressure_rate(bg, d.u0, &st.u_dot);
    let h2 = TangentPlane::zeros(g2).combine(1.0, &momentum_rate_tangential(bg.wall_calculus(), d.u0, &st.u_dot, &q_dot.q, d.f0_dt), -1.0);
    let r = RecipeTrace { h0, h1, h2 };
    bg.set_recipe(r.clone());
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid3;
    use crate::recovery::{BackgroundKind, BackgroundSpec};
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(16, 16, 17, 1.0, 1.0).unwrap()
    }

    fn zero(g: Grid3) -> VectorField {
        VectorField::zeros(g)
    }

    #[test]
    fn steady_downflow_is_compatible() {
        let g = grid();
        let bg = Background::tw_constant(g, 4, 0.1, 1.0).unwrap();
        let u0 = VectorField::constant(g, [0.0, 0.0, -1.0]);
        let z = zero(g);
        let r = check_compat(&bg, &InitialData { u0: &u0, f0: &z, f0_dt: &z });
        for v in [r.trace, r.cond0_velocity, r.cond0_vorticity, r.cond1_velocity, r.cond1_vorticity, r.pressure_gap] {
            assert!(v < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn tangential_bump_is_detected_at_its_amplitude() {
        let g = grid();
        let bg = Background::tw_constant(g, 4, 0.1, 1.0).unwrap();
        let amp = 0.05;
        // supported in the top layer of cells, divergence-free
        let u0 = VectorField::from_fn(g, |x| {
            let w = if x[2] > 1.0 - 1e-12 { 1.0 } else { 0.0 };
            [amp * w * (2.0 * PI * x[1]).sin(), 0.0, -1.0]
        });
        let z = zero(g);
        let r = check_compat(&bg, &InitialData { u0: &u0, f0: &z, f0_dt: &z });
        assert!((r.trace - amp).abs() < 1e-14, "{r:?}");
        assert!(!r.cond0_passes(1e-3));
    }

    fn swirl(g: Grid3, a: f64) -> VectorField {
        // curl of a potential whose tangential part vanishes on both walls
        let psi = VectorField::from_fn(g, |x| {
            let s = (PI * x[2]).sin().powi(2);
            [a * s * (2.0 * PI * x[1]).cos(), a * s * (2.0 * PI * x[0]).sin(), 0.0]
        });
        ops::curl3(&psi)
    }

    fn general_bg(g: Grid3) -> Background {
        let spec = BackgroundSpec {
            kind: BackgroundKind::General,
            inflow_speed: 1.0,
            oscillation: 0.2,
            frequency: 2.0,
            bump: 0.1,
            ..Default::default()
        };
        Background::new(g, 4, 0.05, &spec).unwrap()
    }

    fn forcing(g: Grid3, s: f64) -> VectorField {
        let phi = VectorField::from_fn(g, |x| [0.0, 0.0, s * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()]);
        ops::curl3(&phi)
    }

    #[test]
    fn recipe_satisfies_both_conditions_and_perturbation_is_linear() {
        let g = grid();
        let mut bg = general_bg(g);
        let mut u0 = bg.potential(0.0);
        u0.axpy(1.0, &swirl(g, 0.1));
        let f0 = forcing(g, 0.3);
        let f0_dt = forcing(g, -0.2);
        let d = InitialData { u0: &u0, f0: &f0, f0_dt: &f0_dt };
        let rec = apply_recipe(&mut bg, &d);
        let r = check_compat(&bg, &d);
        assert!(r.trace < 1e-10 && r.cond0_velocity < 1e-10, "{r:?}");
        assert!(r.cond1_velocity < 1e-8, "{r:?}");
        assert!(r.pressure_gap < 1e-10, "{r:?}");
        assert!(r.cond0_vorticity < 1e-10 && r.cond1_vorticity < 1e-10, "{r:?}");

        let eps = 0.1;
        let bump = TangentPlane::from_fn(g.plane(), |x, _| [eps * (2.0 * PI * x).cos(), 0.0]);
        bg.set_recipe(RecipeTrace { h2: rec.h2.combine(1.0, &bump, 1.0), ..rec });
        let p = check_compat(&bg, &d);
        assert!((p.cond1_velocity - eps).abs() < 1e-8, "{p:?}");
        assert!(p.cond1_vorticity > r.cond1_vorticity);
        assert!(p.ratio_in_band(0.05), "{p:?} ratio {}", p.cond1_ratio());
    }
}
