//! Neumann Poisson solver: Fourier modes in the plane, second-order
//! differences in z with ghost-node boundary rows.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fields::spectral::{fft2, fft_planes, ifft_planes, modes};
use crate::fields::{tridiag, PlaneField, ScalarField, VectorField};
use crate::fields::ops;

/// Relative size of the Gauss compatibility defect that triggers a warning.
pub const DEFECT_WARN: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PoissonSolution {
    pub q: ScalarField,
    /// h Σ w s − (∂zq(1) − ∂zq(0)) of the mean mode before correction, per unit area.
    pub defect: f64,
}

/// Solve Δq = source with ∂q/∂n = `top` on z = 1 and `bottom` on z = 0
/// (outward normals), normalized to zero volume mean.
pub fn solve_neumann(source: &ScalarField, top: &PlaneField, bottom: &PlaneField) -> PoissonSolution {
    let g = source.grid;
    let n3 = g.n3;
    let np = g.plane_len();
    let h = g.h3();
    let s_hat = fft_planes(&g, &source.data);
    let gt = fft2(&g.plane(), &top.data);
    // ∂zq on the bottom wall is minus the outward datum.
    let gb: Vec<Complex64> = fft2(&g.plane(), &bottom.data).into_iter().map(|c| -c).collect();
    let mt = modes(&g.plane());
    let w = g.z_weights();

    let zero = Complex64::new(0.0, 0.0);
    let defect = ((0..n3).map(|k| w[k] * s_hat[k * np].re).sum::<f64>() - (gt[0].re - gb[0].re)) / np as f64;
    let scale = (0..n3).map(|k| s_hat[k * np].norm()).fold(0.0, f64::max) / np as f64 + gt[0].norm() / np as f64;
    if defect.abs() > DEFECT_WARN * scale.max(1.0) {
        log::debug!("Neumann compatibility defect {defect:e}; spreading it over both walls");
    }

    let profiles: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|m| {
            let rhs: Vec<Complex64> = (0..n3).map(|k| s_hat[k * np + m]).collect();
            let (mut g0, mut gn) = (gb[m], gt[m]);
            if m == 0 {
                let d = Complex64::new(defect * np as f64, 0.0);
                gn += d * 0.5;
                g0 -= d * 0.5;
            }
            solve_mode(&rhs, mt.k2[m], h, g0, gn, m == 0)
        })
        .collect();

    let mut spec = vec![zero; g.len()];
    for (m, prof) in profiles.iter().enumerate() {
        for k in 0..n3 {
            spec[k * np + m] = prof[k];
        }
    }
    let mut q = ScalarField { grid: g, data: ifft_planes(&g, spec) };
    let mean = q.mean();
    for v in q.data.iter_mut() {
        *v -= mean;
    }
    PoissonSolution { q, defect }
}

/// One mode: rows use (q_{k-1} − 2q_k + q_{k+1})/h² − κ²q_k = s_k with ghost
/// nodes eliminated by ∂zq = g0 (bottom) and gn (top).
fn solve_mode(s: &[Complex64], kappa2: f64, h: f64, g0: Complex64, gn: Complex64, singular: bool) -> Vec<Complex64> {
    let n = s.len();
    let ih2 = 1.0 / (h * h);
    let mut rhs = s.to_vec();
    rhs[0] += g0 * (2.0 / h);
    rhs[n - 1] -= gn * (2.0 / h);
    let mut lower = vec![ih2; n];
    let mut diag = vec![-2.0 * ih2 - kappa2; n];
    let mut upper = vec![ih2; n];
    upper[0] = 2.0 * ih2;
    lower[n - 1] = 2.0 * ih2;
    lower[0] = 0.0;
    upper[n - 1] = 0.0;
    if !singular {
        return tridiag::solve(&lower, &diag, &upper, &rhs);
    }
    // Pin q0 = 0 and drop row 0; the dropped row is implied by compatibility.
    diag.remove(0);
    upper.remove(0);
    lower.remove(0);
    rhs.remove(0);
    lower[0] = 0.0;
    let mut out = vec![Complex64::new(0.0, 0.0)];
    out.extend(tridiag::solve(&lower, &diag, &upper, &rhs));
    out
}

/// ∇q with the normal component on each wall replaced by the Neumann datum.
pub fn neumann_gradient(q: &ScalarField, top: &PlaneField, bottom: &PlaneField) -> VectorField {
    let g = q.grid;
    let mut grad = ops::gradient(q);
    let np = g.plane_len();
    let kt = g.n3 - 1;
    for p in 0..np {
        grad.c[2][kt * np + p] = top.data[p];
        grad.c[2][p] = -bottom.data[p];
    }
    grad
}

/// Interior rows of the discrete operator used by `solve_neumann`.
pub fn discrete_laplacian(q: &ScalarField) -> ScalarField {
    let g = q.grid;
    let lap_h = {
        let spec = fft_planes(&g, &q.data);
        let mt = modes(&g.plane());
        let np = g.plane_len();
        let s: Vec<Complex64> = spec.iter().enumerate().map(|(i, c)| c * -mt.k2[i % np]).collect();
        ifft_planes(&g, s)
    };
    let np = g.plane_len();
    let h = g.h3();
    let mut out = lap_h;
    for k in 1..g.n3 - 1 {
        for p in 0..np {
            let v = |kk: usize| q.data[kk * np + p];
            out[k * np + p] += (v(k - 1) - 2.0 * v(k) + v(k + 1)) / (h * h);
        }
    }
    ScalarField { grid: g, data: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::fields::Grid3;

    #[test]
    fn zero_data_gives_zero() {
        let g = Grid3::new(8, 8, 9, 1.0, 1.0).unwrap();
        let z = PlaneField::zeros(g.plane());
        let s = solve_neumann(&ScalarField::zeros(g), &z, &z);
        assert_eq!(s.q.max_abs(), 0.0);
    }

    fn mms_error(n3: usize) -> f64 {
        let g = Grid3::new(8, 4, n3, 1.0, 1.0).unwrap();
        let k = 2.0 * PI;
        let exact = |x: [f64; 3]| (k * x[0]).cos() * (PI * x[2]).cos() + x[2] * x[2];
        let src = ScalarField::from_fn(g, |x| -(k * k + PI * PI) * (k * x[0]).cos() * (PI * x[2]).cos() + 2.0);
        let top = PlaneField::constant(g.plane(), 2.0);
        let bottom = PlaneField::zeros(g.plane());
        let s = solve_neumann(&src, &top, &bottom);
        let mut e = ScalarField::from_fn(g, exact);
        let m = e.mean();
        e.data.iter_mut().for_each(|v| *v -= m);
        s.q.data.iter().zip(&e.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_second_order() {
        let (e1, e2) = (mms_error(17), mms_error(33));
        assert!(e1 < 1e-2);
        assert!((e1 / e2).log2() > 1.9, "{e1} {e2}");
    }

    #[test]
    fn neumann_gradient_matches_datum() {
        let g = Grid3::new(8, 8, 9, 1.0, 1.0).unwrap();
        let src = ScalarField::from_fn(g, |x| (2.0 * PI * x[1]).sin() * x[2]);
        let top = PlaneField::from_fn(g.plane(), |x, _| (2.0 * PI * x).cos());
        let bottom = PlaneField::from_fn(g.plane(), |_, y| 0.5 * (2.0 * PI * y).sin());
        let s = solve_neumann(&src, &top, &bottom);
        let gr = neumann_gradient(&s.q, &top, &bottom);
        let np = g.plane_len();
        for p in 0..np {
            assert_eq!(gr.c[2][(g.n3 - 1) * np + p], top.data[p]);
            assert_eq!(-gr.c[2][p], bottom.data[p]);
        }
        let lap = discrete_laplacian(&s.q);
        for k in 1..g.n3 - 1 {
            for p in 0..np {
                assert!((lap.data[k * np + p] - src.data[k * np + p]).abs() < 1e-9);
            }
        }
    }
}
