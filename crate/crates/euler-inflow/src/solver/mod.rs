//! The operator A, the Picard loop around it, a-posteriori residuals and
//! the uniqueness check between two solutions.

pub mod config;
pub mod gronwall;
pub mod mms;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary_data::compat::{apply_recipe, check_compat, CompatReport, InitialData};
use crate::boundary_data::{check_constraint, check_inflow_floor, generate_h, inflow_series, validate_vorticity_bc, InflowTraces, InflowVorticity};
use crate::error::{ConfigError, SolverError};
use crate::fields::{holder_norm, ops, x_norm, Grid3, HolderSampling, ScalarField, SpaceTimeSamples, SpaceTimeVelocity, TangentPlane, VectorField};
use crate::flow_map::{verify_eta_bounds, EtaBoundReport, TraceOptions, VelocityHistory};
use crate::geometry::Wall;
use crate::pressure::{solve_q, solve_true_pressure, InflowTrace, PressureSolution};
use crate::recovery::harmonic::project_h;
use crate::recovery::{harmonic_evolve, harmonic_part, recover_velocity, Background, TangentialSpec};
use crate::transport::{lagrangian_solve, range_of_curl_check, RangeReport, TransportProblem, VorticityField};
pub use config::{Mode, SolverConfig};
pub use gronwall::{gronwall_uniqueness_check, GronwallReport};

/// Everything fixed across iterations: grid, background, forcing, initial data.
#[derive(Clone, Debug)]
pub struct Problem {
    pub cfg: SolverConfig,
    pub grid: Grid3,
    pub bg: Background,
    pub u0: VectorField,
    pub forcing: Vec<VectorField>,
    /// g = curl f per slice.
    pub curl_forcing: Vec<VectorField>,
    pub prescribed_h: Option<Vec<InflowVorticity>>,
    pub compat: Option<CompatReport>,
}

impl Problem {
    pub fn new(cfg: &SolverConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let mut spec = cfg.background.clone();
        if cfg.initial.recipe {
            spec.tangential = TangentialSpec::Recipe;
        }
        let mut bg = match cfg.mode {
            Mode::Impermeable => Background::at_rest(grid, cfg.time.nt, cfg.dt()),
            _ => Background::new(grid, cfg.time.nt, cfg.dt(), &spec)?,
        };
        let forcing = cfg.forcing_slices()?;
        let curl_forcing: Vec<VectorField> = forcing.par_iter().map(ops::curl3).collect();
        let swirl = config::swirl(grid, cfg.initial.perturbation, cfg.initial.mode);
        let mut u0 = if cfg.initial.recipe { bg.potential(0.0) } else { bg.full(0.0) };
        u0.axpy(1.0, &swirl);

        let mut prescribed_h = None;
        let mut compat = None;
        match cfg.mode {
            Mode::InflowOutflow => {
                for m in 0..=cfg.time.nt {
                    check_inflow_floor(&bg.normal(Wall::Top, m as f64 * cfg.dt()), cfg.tolerances.inflow_floor)?;
                }
                let f0_dt = cfg.forcing.dt_at(grid, 0.0);
                let data = InitialData { u0: &u0, f0: &forcing[0], f0_dt: &f0_dt };
                if cfg.initial.recipe {
                    apply_recipe(&mut bg, &data);
                }
                let rep = check_compat(&bg, &data);
                if rep.trace > cfg.tolerances.compat {
                    return Err(ConfigError::Incompatible(format!("|u0^tau - U^tau(0)| = {:e}", rep.trace)));
                }
                if rep.cond0_vorticity > cfg.tolerances.compat {
                    warn!("H(0) differs from curl u0 on the inflow wall by {:e}", rep.cond0_vorticity);
                }
                compat = Some(rep);
            }
            Mode::VorticityBc => {
                let v = &cfg.vorticity_bc;
                let g2 = grid.plane();
                let slice = InflowVorticity {
                    tangential: TangentPlane::from_fn(g2, |_, _| v.tangential),
                    normal: crate::fields::PlaneField::constant(g2, v.normal),
                };
                let h = vec![slice; cfg.time.nt + 1];
                let un: Vec<_> = (0..=cfg.time.nt).map(|m| bg.normal(Wall::Top, m as f64 * cfg.dt())).collect();
                let gn: Vec<_> = curl_forcing.iter().map(|g| g.normal(Wall::Top)).collect();
                validate_vorticity_bc(bg.wall_calculus(), &h, &un, &gn, 1e-10)?;
                prescribed_h = Some(h);
            }
            Mode::Impermeable => {}
        }
        Ok(Self { cfg: cfg.clone(), grid, bg, u0, forcing, curl_forcing, prescribed_h, compat })
    }

    pub fn nt(&self) -> usize {
        self.cfg.time.nt
    }
    pub fn dt(&self) -> f64 {
        self.cfg.dt()
    }
    pub fn mode(&self) -> Mode {
        self.cfg.mode
    }

    /// Constant-in-time extension of u₀.
    pub fn initial_iterate(&self) -> SpaceTimeVelocity {
        SpaceTimeVelocity::constant(&self.u0, self.nt(), self.dt())
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions { ode_dt: self.dt() / self.cfg.time.ode_substeps as f64, impermeable: self.mode() == Mode::Impermeable }
    }

    fn dt_normals(&self, m: usize) -> [crate::fields::PlaneField; 2] {
        [self.bg.normal_dt(Wall::Top, m), self.bg.normal_dt(Wall::Bottom, m)]
    }

    /// Replace u(t) by u(t) − u(0) + u₀.
    pub fn pin(&self, u: &SpaceTimeVelocity) -> SpaceTimeVelocity {
        let shift = &self.u0 - &u.slices[0];
        let mut slices: Vec<VectorField> = u.slices.iter().map(|s| s + &shift).collect();
        slices[0] = self.u0.clone();
        SpaceTimeVelocity { grid: u.grid, dt: u.dt, slices }
    }
}

/// One application of A with its intermediate products.
#[derive(Clone, Debug)]
pub struct LinearStep {
    pub input: SpaceTimeVelocity,
    pub v: SpaceTimeVelocity,
    pub q: Vec<PressureSolution>,
    pub h: Option<Vec<InflowVorticity>>,
    pub omega: VorticityField,
    pub range: RangeReport,
    pub harmonic: Vec<[f64; 2]>,
    /// max |∂tH^n + div_Γ(H^n u^τ − U^n H^τ) − g·n| over slices, when H is generated.
    pub constraint: f64,
    pub eta: Option<EtaBoundReport>,
}

fn eta_samples(p: &Problem, k: usize) -> Vec<(f64, f64, [f64; 3])> {
    let n = p.cfg.tolerances.eta_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(p.cfg.seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
    let tf = p.nt() as f64 * p.dt();
    let g = p.grid;
    (0..n)
        .map(|_| {
            let t1 = tf;
            let t2 = rng.gen_range(0.0..tf);
            (t1, t2, [rng.gen_range(0.0..g.l1), rng.gen_range(0.0..g.l2), rng.gen_range(0.05..0.95)])
        })
        .collect()
}

/// The operator A: pin, pressures, boundary vorticity, transport, recovery.
pub fn apply_a(p: &Problem, u: &SpaceTimeVelocity, iteration: usize) -> Result<LinearStep, SolverError> {
    let nt = p.nt();
    let dt = p.dt();
    let u = p.pin(u);
    let bg = &p.bg;
    let wc = bg.wall_calculus();

    let q: Vec<PressureSolution> = (0..=nt)
        .into_par_iter()
        .map(|m| {
            let [dtop, dbot] = p.dt_normals(m);
            match p.mode() {
                Mode::Impermeable => solve_q(wc, &u.slices[m], None, [&dtop, &dbot]),
                _ => {
                    let t = m as f64 * dt;
                    let un = bg.normal(Wall::Top, t);
                    let tau = bg.inflow_tangential(t);
                    solve_q(wc, &u.slices[m], Some(InflowTrace { un: &un, bg_tau: &tau }), [&dtop, &dbot])
                }
            }
        })
        .collect();

    let h: Option<Vec<InflowVorticity>> = match p.mode() {
        Mode::InflowOutflow => Some(
            (0..=nt)
                .into_par_iter()
                .map(|m| generate_h(wc, &u.slices[m], &q[m].q, &InflowTraces::at_slice(bg, m), &p.forcing[m]))
                .collect(),
        ),
        Mode::VorticityBc => p.prescribed_h.clone(),
        Mode::Impermeable => None,
    };
    let constraint = match (p.mode(), &h) {
        (Mode::InflowOutflow, Some(h)) => {
            let ut: Vec<TangentPlane> = u.slices.iter().map(|s| s.tangential(Wall::Top)).collect();
            let un: Vec<_> = (0..=nt).map(|m| bg.normal(Wall::Top, m as f64 * dt)).collect();
            let gn: Vec<_> = p.curl_forcing.iter().map(|g| g.normal(Wall::Top)).collect();
            check_constraint(wc, h, &ut, &un, &gn, dt).iter().map(|r| r.max_abs()).fold(0.0, f64::max)
        }
        _ => 0.0,
    };

    let history = VelocityHistory::new(&u, Some(&p.curl_forcing));
    let opts = p.trace_options();
    let series = h.as_ref().map(|h| inflow_series(h, dt));
    let omega0 = ops::curl3(&p.u0);
    let omega = lagrangian_solve(&TransportProblem { history: &history, omega0: &omega0, inflow: series.as_ref(), opts })?;
    let eta = if p.cfg.tolerances.eta_samples > 0 {
        Some(verify_eta_bounds(&history, &eta_samples(p, iteration), &opts)?)
    } else {
        None
    };

    let range = range_of_curl_check(&omega.slices, p.cfg.tolerances.range_of_curl);
    if let Some(m) = range.first_failure() {
        return Err(SolverError::RangeOfCurl { slice: m, div: range.div[m], flux_top: range.flux_top[m], flux_bottom: range.flux_bottom[m] });
    }

    let harmonic = match (p.mode(), p.cfg.vorticity_bc.harmonic) {
        (Mode::VorticityBc, Some(c)) => vec![c; nt + 1],
        _ => harmonic_evolve(harmonic_part(&p.u0), dt, &omega.slices, &u.slices, &p.forcing),
    };
    let slices: Vec<VectorField> = (0..=nt)
        .into_par_iter()
        .map(|m| recover_velocity(&omega.slices[m], bg, m as f64 * dt, harmonic[m]))
        .collect();
    let v = p.pin(&SpaceTimeVelocity { grid: p.grid, dt, slices });
    Ok(LinearStep { input: u, v, q, h, omega, range, harmonic, constraint, eta })
}

/// Diagnostics of one Picard iterate.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Discrete C^β norm of u_{k+1} − u_k.
    pub diff_holder: f64,
    /// X-norm of u_{k+1} − u_k.
    pub diff_x: f64,
    pub x_norm: f64,
    pub sup_diff: f64,
    pub constraint: f64,
    pub divergence: f64,
    pub normal_trace: f64,
    pub range_worst: f64,
    pub eta_grad_ratio: f64,
    pub eta_det_defect: f64,
    pub regions: [usize; 3],
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    pub mode: Option<Mode>,
    pub converged: bool,
    pub iterations: Vec<IterationRecord>,
    /// Successive ratios of the C^β differences.
    pub contraction: Vec<f64>,
    pub momentum_residual: f64,
    pub momentum_per_slice: Vec<f64>,
    /// ‖u^τ − 𝒰^τ‖_∞ on Γ₊ over slices.
    pub trace_defect: f64,
    /// |P_{H_c} R(t_m)| per slice (vorticity-BC mode).
    pub z_norms: Vec<f64>,
    pub compat: Option<CompatReport>,
    pub generated_h: bool,
}

/// Converged (or last) iterate with its pressure and diagnostics.
#[derive(Clone, Debug)]
pub struct Solution {
    pub u: SpaceTimeVelocity,
    pub p: Vec<PressureSolution>,
    pub last: LinearStep,
    pub report: SolveReport,
}

pub fn normal_trace_defect(p: &Problem, u: &SpaceTimeVelocity) -> f64 {
    let mut worst: f64 = 0.0;
    for (m, s) in u.slices.iter().enumerate() {
        let t = m as f64 * p.dt();
        for wall in [Wall::Top, Wall::Bottom] {
            worst = worst.max(s.normal(wall).zip_with(&p.bg.normal(wall, t), |a, b| a - b).max_abs());
        }
    }
    worst
}

/// Picard iteration u_{k+1} = A u_k from `init` (default: the constant extension of u₀).
pub fn fixed_point_solve(p: &Problem, init: Option<SpaceTimeVelocity>) -> Result<Solution, SolverError> {
    let tol = &p.cfg.tolerances;
    let sampling = HolderSampling { seed: p.cfg.seed ^ 0x5eed, ..Default::default() };
    let mut u = init.unwrap_or_else(|| p.initial_iterate());
    let mut report = SolveReport { mode: Some(p.mode()), compat: p.compat.clone(), generated_h: p.mode() == Mode::InflowOutflow, ..Default::default() };
    let mut last = None;
    for k in 1..=tol.max_iterations {
        let step = apply_a(p, &u, k)?;
        let diff = step.v.sub(&step.input);
        let diff_holder = holder_norm(&SpaceTimeSamples::from_velocity(&diff), tol.beta, &sampling).total();
        let xn = x_norm(&step.v, tol.beta, tol.beta, &sampling);
        let rec = IterationRecord {
            iteration: k,
            diff_holder,
            diff_x: x_norm(&diff, tol.beta, tol.beta, &sampling),
            x_norm: xn,
            sup_diff: diff.max_abs(),
            constraint: step.constraint,
            divergence: step.v.max_divergence(),
            normal_trace: normal_trace_defect(p, &step.v),
            range_worst: step.range.worst(),
            eta_grad_ratio: step.eta.map_or(0.0, |e| e.grad_ratio),
            eta_det_defect: step.eta.map_or(0.0, |e| e.det_defect),
            regions: step.omega.region_counts(),
        };
        info!("iteration {k}: |du|_C^beta = {diff_holder:.3e}, X-norm = {xn:.3e}");
        if let Some(prev) = report.iterations.last() {
            report.contraction.push(diff_holder / prev.diff_holder.max(1e-300));
        }
        report.iterations.push(rec);
        if xn > tol.x_norm_cap {
            return Err(SolverError::InvariantBall { iteration: k, norm: xn, cap: tol.x_norm_cap });
        }
        u = step.v.clone();
        last = Some(step);
        if diff_holder <= tol.fixed_point {
            report.converged = true;
            break;
        }
    }
    if !report.converged {
        warn!("no convergence after {} iterations; a shorter time horizon contracts faster", tol.max_iterations);
    }
    let last = last.expect("at least one iteration");
    let pressures = true_pressures(p, &u);
    let res = momentum_residual(p, &u, &pressures);
    report.momentum_per_slice = res.iter().map(|r| r.max_abs()).collect();
    report.momentum_residual = report.momentum_per_slice.iter().copied().fold(0.0, f64::max);
    report.trace_defect = tangential_trace_defect(p, &u);
    if p.mode() == Mode::VorticityBc {
        report.z_norms = res
            .iter()
            .map(|r| {
                let z = harmonic_part(&project_h(r));
                z[0].hypot(z[1])
            })
            .collect();
    }
    Ok(Solution { u, p: pressures, last, report })
}

/// p per slice from the true-pressure problem.
pub fn true_pressures(p: &Problem, u: &SpaceTimeVelocity) -> Vec<PressureSolution> {
    (0..=p.nt())
        .into_par_iter()
        .map(|m| {
            let [dtop, dbot] = p.dt_normals(m);
            solve_true_pressure(&u.slices[m], [&dtop, &dbot])
        })
        .collect()
}

/// ∂tu + ∇(p + ½|u|²) − u × ω − f per slice.
pub fn momentum_residual(p: &Problem, u: &SpaceTimeVelocity, pressures: &[PressureSolution]) -> Vec<VectorField> {
    (0..=p.nt())
        .into_par_iter()
        .map(|m| {
            let s = &u.slices[m];
            let mut r = u.time_derivative(m);
            r.axpy(1.0, &pressures[m].gradient());
            let ke = ScalarField { grid: s.grid, data: (0..s.grid.len()).map(|q| 0.5 * s.at(q).iter().map(|v| v * v).sum::<f64>()).collect() };
            r.axpy(1.0, &ops::gradient(&ke));
            r.axpy(-1.0, &ops::cross(s, &ops::curl3(s)));
            r.axpy(-1.0, &p.forcing[m]);
            r
        })
        .collect()
}

/// ‖u^τ − 𝒰^τ‖_∞ on Γ₊ over all slices.
pub fn tangential_trace_defect(p: &Problem, u: &SpaceTimeVelocity) -> f64 {
    if p.mode() == Mode::Impermeable {
        return 0.0;
    }
    (0..=p.nt())
        .map(|m| u.slices[m].tangential(Wall::Top).combine(1.0, &p.bg.inflow_tangential(m as f64 * p.dt()), -1.0).max_norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steady_state_is_a_fixed_point() {
        let cfg = SolverConfig::steady(8, 2, 0.05);
        let p = Problem::new(&cfg).unwrap();
        let sol = fixed_point_solve(&p, None).unwrap();
        assert!(sol.report.converged);
        assert_eq!(sol.report.iterations.len(), 1);
        assert!(sol.report.momentum_residual < 1e-8, "{:?}", sol.report);
        assert_eq!(sol.last.h.as_ref().unwrap().iter().map(|h| h.max_abs()).fold(0.0, f64::max), 0.0);
    }

    #[test]
    fn pinning_restores_the_initial_slice() {
        let mut cfg = SolverConfig::steady(8, 2, 0.05);
        cfg.initial.perturbation = 0.05;
        cfg.initial.recipe = true;
        let p = Problem::new(&cfg).unwrap();
        let mut u = p.initial_iterate();
        u.slices[0].add_constant([0.3, 0.0, 0.0]);
        let pinned = p.pin(&u);
        assert_eq!(pinned.slices[0], p.u0);
        assert!((pinned.slices[1].c[0][0] - u.slices[1].c[0][0] + 0.3).abs() < 1e-15);
    }
}
