//! Lagrangian solution of the linear vorticity problem. All grid points of all
//! slices are traced backward together on one time lattice of spacing Δt_ode,
//! so each velocity snapshot is assembled once.

use rayon::prelude::*;

use crate::error::TraceError;
use crate::fields::interp::{pack_vector, Packed, PlaneSeries};
use crate::fields::VectorField;
use crate::flow_map::mat::{self, Mat3};
use crate::flow_map::{
    crossing_fraction, forcing_channels, history_step, rk4_step, Region, TraceOptions, VelocityHistory, CHANNELS, OUTFLOW_SLACK,
};

/// Inputs of the linear transport problem; the forcing curl lives in the history.
#[derive(Clone, Copy)]
pub struct TransportProblem<'a> {
    pub history: &'a VelocityHistory,
    pub omega0: &'a VectorField,
    /// H on Γ₊ per slice. Required unless tracing is impermeable.
    pub inflow: Option<&'a PlaneSeries<3>>,
    pub opts: TraceOptions,
}

/// ω on every slice with the region each grid value came from.
#[derive(Clone, Debug)]
pub struct VorticityField {
    pub dt: f64,
    pub slices: Vec<VectorField>,
    pub regions: Vec<Vec<Region>>,
}

impl VorticityField {
    pub fn nt(&self) -> usize {
        self.slices.len() - 1
    }
    /// Count of (UMinus, UPlus, NearS) over slices 1..=nt.
    pub fn region_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for r in self.regions.iter().skip(1).flatten() {
            c[match r {
                Region::UMinus => 0,
                Region::UPlus => 1,
                Region::NearS => 2,
            }] += 1;
        }
        c
    }
}

#[derive(Clone, Copy, Debug)]
struct Particle {
    x: [f64; 3],
    jac: Mat3,
    forcing: [f64; 3],
    integrand: [f64; 3],
    /// Γ₊ is clamped instead of stopping (after a crossing too close to t = 0).
    clamp_top: bool,
    done: Option<(Region, [f64; 3])>,
}

impl Particle {
    fn new(x: [f64; 3], integrand: [f64; 3]) -> Self {
        Self { x, jac: mat::IDENTITY, forcing: [0.0; 3], integrand, clamp_top: false, done: None }
    }
    fn pushed(&self, v: [f64; 3]) -> [f64; 3] {
        let w = mat::apply(&mat::inverse(&self.jac), v);
        [w[0] + self.forcing[0], w[1] + self.forcing[1], w[2] + self.forcing[2]]
    }
}

fn inflow_at(p: &TransportProblem, t: f64, x: [f64; 3]) -> Result<[f64; 3], TraceError> {
    p.inflow.map(|h| h.sample(t, x[0], x[1])).ok_or(TraceError::MissingInflow(t))
}

/// Solve for ω on every slice. Slice 0 is ω₀.
pub fn lagrangian_solve(p: &TransportProblem) -> Result<VorticityField, TraceError> {
    let h = p.history;
    let g = h.grid();
    let nt = h.series.nt();
    let dt = h.dt();
    let sub = ((dt / p.opts.ode_dt).round() as usize).max(1);
    let ds = dt / sub as f64;
    let tau_tol = p.opts.tau_tol();
    let top = g.n3 - 1;
    let omega0 = pack_vector(p.omega0);
    let stop_on_inflow = !p.opts.impermeable;

    let mut particles: Vec<Vec<Particle>> = vec![Vec::new(); nt + 1];
    let mut level = nt * sub;
    let mut cur = h.series.snapshot(level as f64 * ds);
    while level > 0 {
        let s = level as f64 * ds;
        if level.is_multiple_of(sub) {
            let m = level / sub;
            let inflow = p.inflow;
            let snap = &cur;
            particles[m] = (0..g.len())
                .into_par_iter()
                .map(|q| {
                    let x = g.point(q);
                    let v = snap.data[q];
                    let mut part = Particle::new(x, forcing_channels(&v));
                    if stop_on_inflow && q / g.plane_len() == top {
                        let hv = inflow.map(|hs| hs.node(m, q % g.plane_len())).ok_or(TraceError::MissingInflow(s))?;
                        part.done = Some((Region::UPlus, hv));
                    }
                    Ok(part)
                })
                .collect::<Result<Vec<_>, TraceError>>()?;
        }
        let mid = h.series.snapshot(s - 0.5 * ds);
        let next = h.series.snapshot(s - ds);
        let first = level.div_ceil(sub);
        for slice in particles[first..].iter_mut() {
            slice.par_iter_mut().try_for_each(|part| advance(p, part, s, ds, tau_tol, [&cur, &mid, &next]))?;
        }
        cur = next;
        level -= 1;
    }

    let mut slices = vec![p.omega0.clone()];
    let mut regions = vec![vec![Region::UMinus; g.len()]];
    for ps in particles.iter().skip(1) {
        let vals: Vec<(Region, [f64; 3])> = ps
            .par_iter()
            .map(|part| {
                part.done.unwrap_or_else(|| {
                    let region = if part.clamp_top || (stop_on_inflow && part.x[2] >= 1.0 - 1e-9) { Region::NearS } else { Region::UMinus };
                    (region, part.pushed(omega0.eval(part.x)))
                })
            })
            .collect();
        let mut w = VectorField::zeros(g);
        let mut r = Vec::with_capacity(g.len());
        for (q, (reg, v)) in vals.into_iter().enumerate() {
            for d in 0..3 {
                w.c[d][q] = v[d];
            }
            r.push(reg);
        }
        slices.push(w);
        regions.push(r);
    }
    Ok(VorticityField { dt, slices, regions })
}

/// One backward substep from time s for a live particle.
fn advance(p: &TransportProblem, part: &mut Particle, s: f64, ds: f64, tau_tol: f64, snaps: [&Packed<CHANNELS>; 3]) -> Result<(), TraceError> {
    if part.done.is_some() {
        return Ok(());
    }
    let g = snaps[0].grid;
    let (mut xn, jn) = rk4_step(part.x, &part.jac, -ds, |stage, x| match stage {
        0 => snaps[0].eval(x),
        3 => snaps[2].eval(x),
        _ => snaps[1].eval(x),
    });
    if !p.opts.impermeable && !part.clamp_top && xn[2] > 1.0 {
        let (theta, xc, jc) = crossing_fraction(|th| history_step(p.history, s, part.x, &part.jac, -th * ds));
        let tau = s - theta * ds;
        if tau > tau_tol {
            let gv = mat::apply(&mat::inverse(&jc), forcing_channels(&p.history.sample(tau, xc)));
            for d in 0..3 {
                part.forcing[d] += 0.5 * theta * ds * (part.integrand[d] + gv[d]);
            }
            part.jac = jc;
            part.x = xc;
            let hv = inflow_at(p, tau, xc)?;
            part.done = Some((Region::UPlus, part.pushed(hv)));
            return Ok(());
        }
        part.clamp_top = true;
    }
    if xn[2] < 0.0 {
        if !p.opts.impermeable && xn[2] < -OUTFLOW_SLACK {
            return Err(TraceError::ExitThroughOutflow { t: s, x: part.x, z: xn[2] });
        }
        xn[2] = 0.0;
    }
    xn[2] = xn[2].min(1.0);
    let st = crate::fields::interp::Stencil::new(&g, xn);
    let gv = mat::apply(&mat::inverse(&jn), snaps[2].eval_channels::<3>(&st, 12));
    for d in 0..3 {
        part.forcing[d] += 0.5 * ds * (part.integrand[d] + gv[d]);
    }
    part.integrand = gv;
    part.x = xn;
    part.jac = jn;
    Ok(())
}
