//! Evolution of the harmonic (constant horizontal) velocity component.

use rayon::prelude::*;

use super::biot_savart::{biot_savart, harmonic_part};
use crate::fields::{ops, VectorField};
use crate::geometry::Wall;
use crate::pressure::poisson::{neumann_gradient, solve_neumann};

/// Leray-type projection: v − ∇φ with Δφ = div v and ∂φ/∂n = v·n.
pub fn project_h(v: &VectorField) -> VectorField {
    let div = ops::divergence(v);
    let top = v.normal(Wall::Top);
    let bottom = v.normal(Wall::Bottom);
    let phi = solve_neumann(&div, &top, &bottom).q;
    v - &neumann_gradient(&phi, &top, &bottom)
}

/// Projection onto the harmonic fields span{e_x, e_y}.
pub fn project_hc(v: &VectorField) -> [f64; 2] {
    harmonic_part(v)
}

/// (∇K[ω] − ∇K[ω]ᵀ) u, written as curl K[ω] × u.
pub fn rotation_term(omega: &VectorField, u: &VectorField) -> VectorField {
    ops::cross(&ops::curl3(&biot_savart(omega)), u)
}

/// Rate of change of the harmonic part at one slice.
pub fn harmonic_rate(omega: &VectorField, u: &VectorField, f: &VectorField) -> [f64; 2] {
    let fm = harmonic_part(f);
    let r = project_hc(&project_h(&rotation_term(omega, u)));
    [fm[0] - r[0], fm[1] - r[1]]
}

/// c(t_m) = c(0) + trapezoid of the rates over slices.
pub fn harmonic_evolve(c0: [f64; 2], dt: f64, omega: &[VectorField], u: &[VectorField], f: &[VectorField]) -> Vec<[f64; 2]> {
    let rates: Vec<[f64; 2]> = (0..omega.len()).into_par_iter().map(|m| harmonic_rate(&omega[m], &u[m], &f[m])).collect();
    integrate_rates(c0, dt, &rates)
}

pub fn integrate_rates(c0: [f64; 2], dt: f64, rates: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = vec![c0];
    for m in 1..rates.len() {
        let prev = out[m - 1];
        out.push([
            prev[0] + 0.5 * dt * (rates[m - 1][0] + rates[m][0]),
            prev[1] + 0.5 * dt * (rates[m - 1][1] + rates[m][1]),
        ]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid3;
    use std::f64::consts::PI;

    #[test]
    fn zero_vorticity_and_forcing_keep_c_constant() {
        let g = Grid3::new(8, 8, 9, 1.0, 1.0).unwrap();
        let z = VectorField::zeros(g);
        let u = VectorField::constant(g, [0.3, 0.0, -1.0]);
        let c = harmonic_evolve([0.3, -0.2], 0.1, &vec![z.clone(); 4], &vec![u; 4], &vec![z; 4]);
        assert!(c.iter().all(|v| *v == [0.3, -0.2]));
    }

    #[test]
    fn projection_removes_gradients_and_keeps_mean() {
        let g = Grid3::new(16, 8, 17, 1.0, 1.0).unwrap();
        let v = VectorField::from_fn(g, |x| {
            let s = (2.0 * PI * x[0]).sin() * x[2];
            [0.4 + s, 0.1 * (2.0 * PI * x[1]).cos(), x[2] * x[2]]
        });
        let p = project_h(&v);
        assert!(p.normal(Wall::Top).max_abs() < 1e-14);
        assert!(p.normal(Wall::Bottom).max_abs() < 1e-14);
        let a = project_hc(&p);
        let b = project_hc(&v);
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }
}
