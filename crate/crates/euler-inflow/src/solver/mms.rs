//! Manufactured-solution convergence studies.

use std::f64::consts::PI;

use serde::Serialize;

use crate::fields::{ops, Grid3, PlaneField, ScalarField, VectorField};
use crate::pressure::poisson::solve_neumann;
use crate::recovery::{harmonic_part, recover_velocity, Background};

#[derive(Clone, Debug, Serialize)]
pub struct MmsRow {
    pub n1: usize,
    pub n3: usize,
    pub error: f64,
    /// log2 of the error ratio to the previous row.
    pub order: Option<f64>,
}

fn with_orders(rows: Vec<(usize, usize, f64)>) -> Vec<MmsRow> {
    let mut out: Vec<MmsRow> = Vec::new();
    for (n1, n3, error) in rows {
        let order = out.last().map(|p| (p.error / error).log2());
        out.push(MmsRow { n1, n3, error, order });
    }
    out
}

fn centered_sup_error(q: &ScalarField, exact: &ScalarField) -> f64 {
    let (mq, me) = (q.mean(), exact.mean());
    q.data.iter().zip(&exact.data).map(|(a, b)| ((a - mq) - (b - me)).abs()).fold(0.0, f64::max)
}

/// q = cos(2πx/L₁) cos(πz) + sin(4πy/L₂) eᶻ + z².
fn pressure_error(g: Grid3) -> f64 {
    let (k1, k2) = (2.0 * PI / g.l1, 4.0 * PI / g.l2);
    let exact = ScalarField::from_fn(g, |x| (k1 * x[0]).cos() * (PI * x[2]).cos() + (k2 * x[1]).sin() * x[2].exp() + x[2] * x[2]);
    let src = ScalarField::from_fn(g, |x| {
        -(k1 * k1 + PI * PI) * (k1 * x[0]).cos() * (PI * x[2]).cos() + (1.0 - k2 * k2) * (k2 * x[1]).sin() * x[2].exp() + 2.0
    });
    let top = PlaneField::from_fn(g.plane(), |_, y| (k2 * y).sin() * 1f64.exp() + 2.0);
    let bottom = PlaneField::from_fn(g.plane(), |_, y| -(k2 * y).sin());
    centered_sup_error(&solve_neumann(&src, &top, &bottom).q, &exact)
}

/// z refinement of the Neumann solver at fixed in-plane resolution.
pub fn pressure_z_study(n1: usize, n3_levels: &[usize]) -> Vec<MmsRow> {
    with_orders(n3_levels.iter().map(|&n3| (n1, n3, pressure_error(Grid3::new(n1, n1, n3, 1.0, 1.0).unwrap()))).collect())
}

/// In-plane refinement with q = exp(cos(2πx/L₁)) z², whose z profile the
/// difference scheme reproduces exactly: the error is the in-plane truncation alone.
pub fn pressure_plane_study(n1_levels: &[usize], n3: usize) -> Vec<MmsRow> {
    let rows = n1_levels
        .iter()
        .map(|&n1| {
            let g = Grid3::new(n1, 4, n3, 1.0, 1.0).unwrap();
            let k = 2.0 * PI / g.l1;
            let e = |x: f64| (k * x).cos().exp();
            let exact = ScalarField::from_fn(g, |x| e(x[0]) * x[2] * x[2]);
            // (e^{cos kx})'' = k²(sin² kx − cos kx) e^{cos kx}
            let src = ScalarField::from_fn(g, |x| {
                let (s, c) = (k * x[0]).sin_cos();
                k * k * (s * s - c) * e(x[0]) * x[2] * x[2] + 2.0 * e(x[0])
            });
            let top = PlaneField::from_fn(g.plane(), |x, _| 2.0 * e(x));
            let bottom = PlaneField::zeros(g.plane());
            (n1, n3, centered_sup_error(&solve_neumann(&src, &top, &bottom).q, &exact))
        })
        .collect();
    with_orders(rows)
}

/// Round trip u → curl u → K[curl u] + 𝒱 + c on n²×(n+1) grids.
pub fn biot_savart_study(levels: &[usize]) -> Vec<MmsRow> {
    let rows = levels
        .iter()
        .map(|&n| {
            let g = Grid3::new(n, n, n + 1, 1.0, 1.0).unwrap();
            let bg = Background::tw_constant(g, 1, 1.0, 1.0).unwrap();
            let (kx, ky) = (2.0 * PI, 2.0 * PI);
            // uniform downflow, a mean horizontal drift, a z shear with zero mean, and curl of sin²(πz)(cos ky, sin kx, 0)
            let u = VectorField::from_fn(g, |x| {
                let s2 = (PI * x[2]).sin().powi(2);
                let ds2 = PI * (2.0 * PI * x[2]).sin();
                let shear = 0.1 * (PI * x[2]).cos();
                [
                    0.3 + shear - 0.2 * ds2 * (kx * x[0]).sin(),
                    -0.1 + 0.2 * ds2 * (ky * x[1]).cos(),
                    -1.0 + 0.2 * s2 * (kx * (kx * x[0]).cos() + ky * (ky * x[1]).sin()),
                ]
            });
            let omega = ops::curl3(&u);
            let v = recover_velocity(&omega, &bg, 0.0, harmonic_part(&u));
            (n, n + 1, (&v - &u).max_abs())
        })
        .collect();
    with_orders(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biot_savart_round_trip_is_second_order() {
        let r = biot_savart_study(&[8, 16, 32]);
        assert!(r[2].order.unwrap() > 1.8, "{r:?}");
    }

    #[test]
    fn pressure_orders() {
        let z = pressure_z_study(8, &[17, 33]);
        assert!(z[1].order.unwrap() > 1.9, "{z:?}");
        let p = pressure_plane_study(&[4, 8, 16, 32], 9);
        assert!(p[2].order.unwrap() > 8.0 && p[3].error < 1e-11, "{p:?}");
    }
}
