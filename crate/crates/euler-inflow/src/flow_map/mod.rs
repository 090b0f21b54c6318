//! Characteristics of a frozen velocity: the flow map η(t₁,t₂;x), its
//! gradient, and where backward characteristics meet the inflow wall.

pub mod mat;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::TraceError;
use crate::fields::interp::{Packed, PackedSeries};
use crate::fields::{ops, Grid3, SpaceTimeVelocity, VectorField};
use mat::Mat3;

/// Channels per node: u (0..3), ∇u (3..12, entry 3i+j = ∂_j u_i), curl f (12..15), pad.
pub const CHANNELS: usize = 16;
const GRAD: usize = 3;
const FORCING: usize = 12;

/// Bisection budget for the Γ₊ crossing.
pub const CROSSING_ITERS: usize = 60;
pub const CROSSING_TOL: f64 = 1e-12;
/// Backward characteristics may dip this far below z = 0 before it counts as an outflow exit.
pub const OUTFLOW_SLACK: f64 = 1e-8;

/// Velocity, velocity gradient and forcing curl on every slice, Hermite-interpolated in time.
#[derive(Clone, Debug)]
pub struct VelocityHistory {
    pub series: PackedSeries<CHANNELS>,
    /// ‖∇u(t_m)‖_∞ (matrix norm) per slice.
    pub grad_norms: Vec<f64>,
    /// max |u(t_m)| per slice.
    pub speed_norms: Vec<f64>,
}

impl VelocityHistory {
    pub fn new(u: &SpaceTimeVelocity, curl_f: Option<&[VectorField]>) -> Self {
        let g = u.grid;
        let built: Vec<(Packed<CHANNELS>, f64, f64)> = u
            .slices
            .par_iter()
            .enumerate()
            .map(|(m, s)| {
                let gt = ops::grad_tensor(s);
                let mut chans: Vec<&[f64]> = s.c.iter().map(|c| c.as_slice()).collect();
                chans.extend(gt.iter().map(|c| c.as_slice()));
                if let Some(f) = curl_f {
                    chans.extend(f[m].c.iter().map(|c| c.as_slice()));
                }
                let p = Packed::from_channels(g, &chans);
                (p, ops::grad_sup_norm(&gt), s.max_norm())
            })
            .collect();
        let mut nodes = Vec::with_capacity(built.len());
        let mut grad_norms = Vec::new();
        let mut speed_norms = Vec::new();
        for (p, gn, sn) in built {
            nodes.push(p);
            grad_norms.push(gn);
            speed_norms.push(sn);
        }
        Self { series: PackedSeries::new(u.dt, nodes), grad_norms, speed_norms }
    }

    pub fn grid(&self) -> Grid3 {
        self.series.grid()
    }
    pub fn dt(&self) -> f64 {
        self.series.dt
    }
    pub fn t_final(&self) -> f64 {
        self.series.t_final()
    }

    #[inline]
    pub fn sample(&self, t: f64, x: [f64; 3]) -> [f64; CHANNELS] {
        self.series.sample(t, x)
    }

    /// |∫_{t₁}^{t₂} ‖∇u(s)‖_∞ ds| with the slice norms interpolated linearly.
    pub fn grad_integral(&self, t1: f64, t2: f64) -> f64 {
        let (a, b) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let dt = self.dt();
        let nt = self.grad_norms.len() - 1;
        let norm_at = |t: f64| {
            let u = (t / dt).clamp(0.0, nt as f64);
            let m = (u.floor() as usize).min(nt - 1);
            let th = u - m as f64;
            (1.0 - th) * self.grad_norms[m] + th * self.grad_norms[m + 1]
        };
        let mut knots = vec![a];
        let mut m = (a / dt).floor() as usize + 1;
        while (m as f64) * dt < b {
            knots.push(m as f64 * dt);
            m += 1;
        }
        knots.push(b);
        knots.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (norm_at(w[0]) + norm_at(w[1]))).sum()
    }

    pub fn max_speed(&self) -> f64 {
        self.speed_norms.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions {
    /// RK4 substep.
    pub ode_dt: f64,
    /// Clamp both walls instead of stopping on Γ₊.
    pub impermeable: bool,
}

impl TraceOptions {
    /// Substep Δt/8.
    pub fn for_history(h: &VelocityHistory) -> Self {
        Self { ode_dt: h.dt() / 8.0, impermeable: false }
    }
    pub fn tau_tol(&self) -> f64 {
        2.0 * self.ode_dt
    }
}

/// Right-hand side of the characteristic and variational equations.
#[inline]
pub fn flow_rhs(v: &[f64; CHANNELS], j: &Mat3) -> ([f64; 3], Mat3) {
    let mut grad = [0.0; 9];
    grad.copy_from_slice(&v[GRAD..GRAD + 9]);
    ([v[0], v[1], v[2]], mat::mul(&grad, j))
}

#[inline]
pub fn forcing_channels(v: &[f64; CHANNELS]) -> [f64; 3] {
    [v[FORCING], v[FORCING + 1], v[FORCING + 2]]
}

/// One classical RK4 step of size `ds`. `eval(stage, x)` returns the channels at
/// the stage time (0: start, 1 and 2: midpoint, 3: end).
#[inline]
pub fn rk4_step(x: [f64; 3], j: &Mat3, ds: f64, mut eval: impl FnMut(usize, [f64; 3]) -> [f64; CHANNELS]) -> ([f64; 3], Mat3) {
    let shift = |x: [f64; 3], k: [f64; 3], a: f64| [x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2]];
    let shift_m = |j: &Mat3, k: &Mat3, a: f64| {
        let mut o = *j;
        for q in 0..9 {
            o[q] += a * k[q];
        }
        o
    };
    let (k1, l1) = flow_rhs(&eval(0, x), j);
    let x2 = shift(x, k1, 0.5 * ds);
    let (k2, l2) = flow_rhs(&eval(1, x2), &shift_m(j, &l1, 0.5 * ds));
    let x3 = shift(x, k2, 0.5 * ds);
    let (k3, l3) = flow_rhs(&eval(2, x3), &shift_m(j, &l2, 0.5 * ds));
    let x4 = shift(x, k3, ds);
    let (k4, l4) = flow_rhs(&eval(3, x4), &shift_m(j, &l3, ds));
    let mut xn = x;
    let mut jn = *j;
    for d in 0..3 {
        xn[d] += ds / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    }
    for q in 0..9 {
        jn[q] += ds / 6.0 * (l1[q] + 2.0 * l2[q] + 2.0 * l3[q] + l4[q]);
    }
    (xn, jn)
}

/// RK4 step of the point-sampled history starting at time s.
pub fn history_step(h: &VelocityHistory, s: f64, x: [f64; 3], j: &Mat3, ds: f64) -> ([f64; 3], Mat3) {
    const C: [f64; 4] = [0.0, 0.5, 0.5, 1.0];
    rk4_step(x, j, ds, |stage, p| h.sample(s + C[stage] * ds, p))
}

/// Fraction θ ∈ (0,1] of the step from (x, j) at which z reaches 1, found by bisection.
pub fn crossing_fraction(mut step: impl FnMut(f64) -> ([f64; 3], Mat3)) -> (f64, [f64; 3], Mat3) {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = step(1.0);
    let mut theta = 1.0;
    for _ in 0..CROSSING_ITERS {
        let mid = 0.5 * (lo + hi);
        let r = step(mid);
        let z = r.0[2];
        theta = mid;
        best = r;
        if (z - 1.0).abs() < CROSSING_TOL {
            break;
        }
        if z > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    best.0[2] = 1.0;
    (theta, best.0, best.1)
}

/// A traced characteristic from (t₁, x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trajectory {
    /// Position at `t_end`.
    pub x: [f64; 3],
    /// ∇η(t₁, t_end; x).
    pub jac: Mat3,
    pub t_end: f64,
    /// Backward trace stopped on Γ₊.
    pub hit_inflow: bool,
    /// ∫ between t_end and t₁ of ∇η(t₁,s)⁻¹ curl f(s, η) ds (trapezoid on the substeps).
    pub forcing: [f64; 3],
}

/// Clip a position to the closed channel after a step. Returns an error for a backward exit through Γ₋.
fn clamp_z(x: &mut [f64; 3], backward: bool, t: f64, origin: [f64; 3]) -> Result<(), TraceError> {
    if x[2] < 0.0 {
        if backward && x[2] < -OUTFLOW_SLACK {
            return Err(TraceError::ExitThroughOutflow { t, x: origin, z: x[2] });
        }
        x[2] = 0.0;
    }
    if x[2] > 1.0 {
        x[2] = 1.0;
    }
    Ok(())
}

fn forcing_integrand(h: &VelocityHistory, s: f64, x: [f64; 3], j: &Mat3) -> [f64; 3] {
    mat::apply(&mat::inverse(j), forcing_channels(&h.sample(s, x)))
}

/// Integrate from (t₁, x) to t₂. A backward trace stops at the first Γ₊ crossing
/// unless `opts.impermeable` or `clamp_inflow` is set.
pub fn integrate(h: &VelocityHistory, t1: f64, t2: f64, x: [f64; 3], opts: &TraceOptions, clamp_inflow: bool) -> Result<Trajectory, TraceError> {
    let backward = t2 < t1;
    let stop_on_inflow = backward && !opts.impermeable && !clamp_inflow;
    let mut out = Trajectory { x, jac: mat::IDENTITY, t_end: t1, hit_inflow: false, forcing: [0.0; 3] };
    if t1 == t2 {
        return Ok(out);
    }
    if stop_on_inflow && x[2] >= 1.0 - CROSSING_TOL {
        out.x[2] = 1.0;
        out.hit_inflow = true;
        return Ok(out);
    }
    let span = t2 - t1;
    let n = ((span.abs() / opts.ode_dt) - 1e-9).ceil().max(1.0) as usize;
    let ds = span / n as f64;
    let w = ds.abs();
    let mut prev = forcing_integrand(h, t1, x, &out.jac);
    let (mut pos, mut jac) = (x, mat::IDENTITY);
    for step in 0..n {
        let s = t1 + step as f64 * ds;
        let (mut xn, jn) = history_step(h, s, pos, &jac, ds);
        if stop_on_inflow && xn[2] > 1.0 {
            let (theta, xc, jc) = crossing_fraction(|th| history_step(h, s, pos, &jac, th * ds));
            let tc = s + theta * ds;
            let cur = forcing_integrand(h, tc, xc, &jc);
            for d in 0..3 {
                out.forcing[d] += 0.5 * theta * w * (prev[d] + cur[d]);
            }
            out.x = xc;
            out.jac = jc;
            out.t_end = tc;
            out.hit_inflow = true;
            return Ok(out);
        }
        clamp_z(&mut xn, backward, t1, x)?;
        let sn = if step + 1 == n { t2 } else { s + ds };
        let cur = forcing_integrand(h, sn, xn, &jn);
        for d in 0..3 {
            out.forcing[d] += 0.5 * w * (prev[d] + cur[d]);
        }
        prev = cur;
        pos = xn;
        jac = jn;
    }
    out.x = pos;
    out.jac = jac;
    out.t_end = t2;
    Ok(out)
}

/// η(t₁, t₂; x).
pub fn trace(h: &VelocityHistory, t1: f64, t2: f64, x: [f64; 3], opts: &TraceOptions) -> Result<[f64; 3], TraceError> {
    Ok(integrate(h, t1, t2, x, opts, false)?.x)
}

/// ∇η(t₁, t₂; x). A backward trace that meets Γ₊ first returns the gradient at the crossing.
pub fn grad_eta(h: &VelocityHistory, t1: f64, t2: f64, x: [f64; 3], opts: &TraceOptions) -> Result<Mat3, TraceError> {
    Ok(integrate(h, t1, t2, x, opts, false)?.jac)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    UMinus,
    UPlus,
    NearS,
}

/// Where the backward characteristic through (t, x) comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryTrace {
    pub region: Region,
    /// Hit time τ on Γ₊ (UPlus, NearS); 0 for UMinus.
    pub tau: f64,
    /// Hit point γ on Γ₊ for UPlus, foot point γ₀ at t = 0 otherwise.
    pub point: [f64; 3],
    /// ∇η(t, τ; x) for UPlus, ∇η(t, 0; x) otherwise.
    pub jac: Mat3,
    pub forcing: [f64; 3],
}

/// Classify (t, x). Crossings within `opts.tau_tol()` of t = 0 are NearS and
/// carried to t = 0 with Γ₊ clamped, like UMinus points.
pub fn classify(h: &VelocityHistory, t: f64, x: [f64; 3], opts: &TraceOptions) -> Result<BoundaryTrace, TraceError> {
    let tr = integrate(h, t, 0.0, x, opts, false)?;
    if tr.hit_inflow && tr.t_end > opts.tau_tol() {
        return Ok(BoundaryTrace { region: Region::UPlus, tau: tr.t_end, point: tr.x, jac: tr.jac, forcing: tr.forcing });
    }
    if tr.hit_inflow || (!opts.impermeable && tr.x[2] >= 1.0 - 1e-9) {
        let tau = tr.t_end;
        let full = integrate(h, t, 0.0, x, opts, true)?;
        return Ok(BoundaryTrace { region: Region::NearS, tau, point: full.x, jac: full.jac, forcing: full.forcing });
    }
    Ok(BoundaryTrace { region: Region::UMinus, tau: 0.0, point: tr.x, jac: tr.jac, forcing: tr.forcing })
}

/// Worst ratios of the flow-map bounds over the samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EtaBoundReport {
    pub samples: usize,
    /// max ‖∇η(t₁,t₂;x)‖_∞ / h(t₁,t₂).
    pub grad_ratio: f64,
    /// max |∂_{t₁}η| / (‖u‖_∞ h(t₁,t₂)).
    pub dt_ratio: f64,
    /// max |det ∇η − 1|.
    pub det_defect: f64,
}

impl EtaBoundReport {
    pub fn passes(&self, slack: f64, det_tol: f64) -> bool {
        self.grad_ratio <= 1.0 + slack && self.dt_ratio <= 1.0 + slack && self.det_defect <= det_tol
    }
}

/// Check ‖∇η‖ ≤ h and |∂_{t₁}η| ≤ ‖u‖_∞ h, h = exp|∫‖∇u‖_∞|, on sample triples (t₁, t₂, x).
/// Backward samples that reach Γ₊ are measured at the crossing with h over the traced span.
pub fn verify_eta_bounds(h: &VelocityHistory, samples: &[(f64, f64, [f64; 3])], opts: &TraceOptions) -> Result<EtaBoundReport, TraceError> {
    let umax = h.max_speed();
    let rows: Vec<Result<(f64, f64, f64), TraceError>> = samples
        .par_iter()
        .map(|&(t1, t2, x)| {
            let tr = integrate(h, t1, t2, x, opts, false)?;
            let bound = h.grad_integral(t1, tr.t_end).exp();
            let u = h.sample(t1, x);
            let dt_eta = mat::apply(&tr.jac, [u[0], u[1], u[2]]);
            let dt_norm = dt_eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let dt_ratio = if umax > 0.0 { dt_norm / (umax * bound) } else { 0.0 };
            Ok((mat::inf_norm(&tr.jac) / bound, dt_ratio, (mat::det(&tr.jac) - 1.0).abs()))
        })
        .collect();
    let mut rep = EtaBoundReport { samples: samples.len(), ..Default::default() };
    for r in rows {
        let (a, b, c) = r?;
        rep.grad_ratio = rep.grad_ratio.max(a);
        rep.dt_ratio = rep.dt_ratio.max(b);
        rep.det_defect = rep.det_defect.max(c);
    }
    Ok(rep)
}

/// Points (t, x, y, z) of the discrete separating surface S: per slice and column,
/// the height where the backward characteristic meets Γ₊ exactly at τ = 0.
pub fn separating_surface(h: &VelocityHistory, opts: &TraceOptions) -> Result<Vec<[f64; 4]>, TraceError> {
    let g = h.grid();
    let nt = h.series.nt();
    let mut jobs = Vec::new();
    for m in 1..=nt {
        for p in 0..g.plane_len() {
            jobs.push((m, p));
        }
    }
    let found: Vec<Result<Option<[f64; 4]>, TraceError>> = jobs
        .par_iter()
        .map(|&(m, p)| {
            let t = m as f64 * h.dt();
            let (x, y) = g.plane().xy(p);
            let hits = |z: f64| -> Result<bool, TraceError> { Ok(integrate(h, t, 0.0, [x, y, z], opts, false)?.hit_inflow) };
            let (mut lo, mut hi) = (0.0, 1.0 - 1e-9);
            if hits(lo)? || !hits(hi)? {
                return Ok(None);
            }
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if hits(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(Some([t, x, y, 0.5 * (lo + hi)]))
        })
        .collect();
    let mut out = Vec::new();
    for f in found {
        if let Some(pt) = f? {
            out.push(pt);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(8, 8, 9, 1.0, 1.0).unwrap()
    }

    fn steady(f: impl Fn([f64; 3]) -> [f64; 3], nt: usize, dt: f64) -> VelocityHistory {
        let u = VectorField::from_fn(grid(), f);
        VelocityHistory::new(&SpaceTimeVelocity::constant(&u, nt, dt), None)
    }

    fn opts(ode_dt: f64) -> TraceOptions {
        TraceOptions { ode_dt, impermeable: false }
    }

    #[test]
    fn constant_downflow_translates() {
        let h = steady(|_| [0.0, 0.0, -1.0], 4, 0.25);
        let o = opts(1.0 / 64.0);
        let x = [0.3, 0.6, 0.2];
        let e = trace(&h, 0.5, 0.2, x, &o).unwrap();
        assert!((e[2] - 0.5).abs() < 1e-14 && e[0] == 0.3 && e[1] == 0.6);
        assert_eq!(trace(&h, 0.5, 0.5, x, &o).unwrap(), x);
        assert_eq!(grad_eta(&h, 0.5, 0.1, x, &o).unwrap(), mat::IDENTITY);
    }

    #[test]
    fn shear_trajectory_and_gradient_are_exact() {
        let h = steady(|x| [x[2], 0.0, 0.0], 4, 0.25);
        let o = opts(1e-3);
        let x = [0.1, 0.2, 0.5];
        let t = 0.75;
        let e = trace(&h, 0.0, t, x, &o).unwrap();
        assert!((e[0] - (0.1 + t * 0.5)).abs() < 1e-12, "{e:?}");
        let j = grad_eta(&h, 0.0, t, x, &o).unwrap();
        let mut want = mat::IDENTITY;
        want[2] = t;
        assert!(mat::max_abs_diff(&j, &want) < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let h = steady(|_| [0.0, 0.0, -1.0], 4, 0.25);
        let o = opts(1.0 / 128.0);
        let up = classify(&h, 0.5, [0.25, 0.5, 0.9], &o).unwrap();
        assert_eq!(up.region, Region::UPlus);
        assert!((up.tau - 0.4).abs() < 1e-11, "{}", up.tau);
        assert_eq!(up.point[2], 1.0);
        assert!((up.point[0] - 0.25).abs() < 1e-14);
        let dn = classify(&h, 0.5, [0.25, 0.5, 0.2], &o).unwrap();
        assert_eq!(dn.region, Region::UMinus);
        assert!((dn.point[2] - 0.7).abs() < 1e-13);
        let s = classify(&h, 0.5, [0.25, 0.5, 0.5], &o).unwrap();
        assert_eq!(s.region, Region::NearS);
        assert!((s.point[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_forcing_integrates_exactly() {
        let g = grid();
        let u = SpaceTimeVelocity::constant(&VectorField::constant(g, [0.0, 0.0, -1.0]), 4, 0.25);
        let f = vec![VectorField::constant(g, [1.0, 0.0, 0.0]); 5];
        let h = VelocityHistory::new(&u, Some(&f));
        let o = opts(1.0 / 64.0);
        let up = classify(&h, 0.5, [0.0, 0.0, 0.9], &o).unwrap();
        assert!((up.forcing[0] - 0.1).abs() < 1e-11);
        let dn = classify(&h, 0.5, [0.0, 0.0, 0.2], &o).unwrap();
        assert!((dn.forcing[0] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn outflow_exit_is_an_error() {
        let h = steady(|_| [0.0, 0.0, 1.0], 2, 0.5);
        let r = trace(&h, 1.0, 0.0, [0.0, 0.0, 0.5], &opts(0.01));
        assert!(matches!(r, Err(TraceError::ExitThroughOutflow { .. })));
    }

    fn swirl() -> VelocityHistory {
        // discretely divergence-free and tangent to both walls
        let k = 2.0 * PI;
        let omega = VectorField::from_fn(grid(), move |x| {
            [0.4 * (k * x[1]).sin() * (PI * x[2]).cos(), 0.3 * (k * x[0]).cos() * x[2], 0.5 * (k * x[0]).sin()]
        });
        let mut u = crate::recovery::biot_savart(&ops::curl3(&crate::recovery::biot_savart(&omega)));
        u.add_constant([0.2, 0.1, 0.0]);
        VelocityHistory::new(&SpaceTimeVelocity::constant(&u, 4, 0.25), None)
    }

    #[test]
    fn volume_preservation_and_bounds() {
        let h = swirl();
        let o = TraceOptions { ode_dt: 1e-3, impermeable: true };
        let samples: Vec<(f64, f64, [f64; 3])> =
            (0..12).map(|i| (0.0, 1.0, [0.08 * i as f64, 0.05 * i as f64, 0.1 + 0.06 * i as f64])).collect();
        let rep = verify_eta_bounds(&h, &samples, &o).unwrap();
        assert!(rep.passes(0.1, 1e-6), "{rep:?}");
    }

    #[test]
    fn shear_bound_example() {
        let h = steady(|x| [x[2], 0.0, 0.0], 4, 0.25);
        let o = opts(1e-3);
        let rep = verify_eta_bounds(&h, &[(0.0, 1.0, [0.2, 0.2, 0.5])], &o).unwrap();
        assert!((rep.grad_ratio - 2.0 / 1f64.exp()).abs() < 1e-9, "{rep:?}");
    }

    #[test]
    fn group_property_and_inverse_jacobian() {
        let h = swirl();
        let o = TraceOptions { ode_dt: 1e-2, impermeable: true };
        let x = [0.3, 0.4, 0.5];
        let a = trace(&h, 0.0, 0.4, x, &o).unwrap();
        let b = trace(&h, 0.4, 1.0, a, &o).unwrap();
        let c = trace(&h, 0.0, 1.0, x, &o).unwrap();
        assert!((0..3).all(|d| (b[d] - c[d]).abs() < 1e-8), "{b:?} {c:?}");
        let jf = grad_eta(&h, 0.0, 0.6, x, &o).unwrap();
        let y = trace(&h, 0.0, 0.6, x, &o).unwrap();
        let jb = grad_eta(&h, 0.6, 0.0, y, &o).unwrap();
        assert!(mat::max_abs_diff(&mat::mul(&jb, &jf), &mat::IDENTITY) < 1e-6);
    }

    #[test]
    fn separating_surface_for_downflow_is_z_equals_one_minus_t() {
        let h = steady(|_| [0.0, 0.0, -1.0], 2, 0.25);
        let pts = separating_surface(&h, &opts(1.0 / 64.0)).unwrap();
        assert_eq!(pts.len(), 2 * 64);
        assert!(pts.iter().all(|p| (p[3] - (1.0 - p[0])).abs() < 1e-9));
    }
}
