//! Velocity from vorticity in the channel: per horizontal mode a Dirichlet
//! problem for the vertical velocity, then the horizontal part chosen so the
//! discrete divergence vanishes exactly.

use num_complex::Complex64;
use rayon::prelude::*;

use super::background::Background;
use crate::fields::ops::dz_profile;
use crate::fields::spectral::{fft_planes, ifft_planes, modes};
use crate::fields::{tridiag, Grid3, VectorField};

/// The field v with curl v ≈ ω, div v = 0, v·n = 0 on both walls and zero mean horizontal velocity.
pub fn biot_savart(omega: &VectorField) -> VectorField {
    let g = omega.grid;
    let np = g.plane_len();
    let n3 = g.n3;
    let h = g.h3();
    let wx = fft_planes(&g, &omega.c[0]);
    let wy = fft_planes(&g, &omega.c[1]);
    let wz = fft_planes(&g, &omega.c[2]);
    let mt = modes(&g.plane());
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);

    let per_mode: Vec<[Vec<Complex64>; 3]> = (1..np)
        .into_par_iter()
        .map(|m| {
            let (kx, ky) = (mt.kx[m], mt.ky[m]);
            let kk = kx * kx + ky * ky;
            if kk == 0.0 {
                return [vec![zero; n3], vec![zero; n3], vec![zero; n3]];
            }
            let at = |f: &Vec<Complex64>, k: usize| f[k * np + m];
            // (Dzz − |k|²) v_z = −(i kx ω_y − i ky ω_x), v_z = 0 at both walls
            let ni = n3 - 2;
            let ih2 = 1.0 / (h * h);
            let rhs: Vec<Complex64> = (1..n3 - 1).map(|k| -(i * kx * at(&wy, k) - i * ky * at(&wx, k))).collect();
            let lower = vec![ih2; ni];
            let diag = vec![-2.0 * ih2 - kk; ni];
            let upper = vec![ih2; ni];
            let mut vz = vec![zero];
            vz.extend(tridiag::solve(&lower, &diag, &upper, &rhs));
            vz.push(zero);
            let d: Vec<Complex64> = dz_profile(&vz, h).into_iter().map(|c| -c).collect();
            let vx: Vec<Complex64> = (0..n3).map(|k| -i * (d[k] * kx - at(&wz, k) * ky) / kk).collect();
            let vy: Vec<Complex64> = (0..n3).map(|k| -i * (d[k] * ky + at(&wz, k) * kx) / kk).collect();
            [vx, vy, vz]
        })
        .collect();

    let mut spec = [vec![zero; g.len()], vec![zero; g.len()], vec![zero; g.len()]];
    for (idx, comps) in per_mode.iter().enumerate() {
        let m = idx + 1;
        for (c, prof) in comps.iter().enumerate() {
            for k in 0..n3 {
                spec[c][k * np + m] = prof[k];
            }
        }
    }
    // Mean mode: v_x' = ω_y, v_y' = −ω_x, zero mean over z.
    let w = g.z_weights();
    for (c, src, sign) in [(0, &wy, 1.0), (1, &wx, -1.0)] {
        let mut prof = vec![0.0; n3];
        for k in 1..n3 {
            prof[k] = prof[k - 1] + 0.5 * h * sign * (src[(k - 1) * np].re + src[k * np].re);
        }
        let mean: f64 = prof.iter().zip(&w).map(|(a, b)| a * b).sum();
        for k in 0..n3 {
            spec[c][k * np] = Complex64::new(prof[k] - mean, 0.0);
        }
    }
    let [sx, sy, sz] = spec;
    VectorField { grid: g, c: [ifft_planes(&g, sx), ifft_planes(&g, sy), ifft_planes(&g, sz)] }
}

/// u = K[ω] + 𝒱(t) + (c₁, c₂, 0).
pub fn recover_velocity(omega: &VectorField, bg: &Background, t: f64, c: [f64; 2]) -> VectorField {
    let mut u = &biot_savart(omega) + &bg.potential(t);
    u.add_constant([c[0], c[1], 0.0]);
    u
}

/// Trapezoid mean of the horizontal components: the harmonic part on the channel.
pub fn harmonic_part(v: &VectorField) -> [f64; 2] {
    let m = v.mean();
    [m[0], m[1]]
}

/// Largest |û_z| on either wall over all modes, divided by the plane size.
pub fn max_mode_normal_trace(v: &VectorField, reference: &VectorField) -> f64 {
    let g: Grid3 = v.grid;
    let np = g.plane_len();
    let d: Vec<f64> = v.c[2].iter().zip(&reference.c[2]).map(|(a, b)| a - b).collect();
    let mut worst: f64 = 0.0;
    for k in [0, g.n3 - 1] {
        let spec = crate::fields::spectral::fft2(&g.plane(), &d[k * np..(k + 1) * np]);
        worst = spec.iter().fold(worst, |m, c| m.max(c.norm() / np as f64));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ops;
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(16, 8, 33, 1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_vorticity_gives_zero() {
        let v = biot_savart(&VectorField::zeros(grid()));
        assert_eq!(v.max_abs(), 0.0);
    }

    #[test]
    fn vertical_vorticity_is_reproduced() {
        let g = grid();
        let k = 2.0 * PI;
        // vertical part sin(kx)ρ(z) completed by a horizontal part to make it divergence-free
        let omega = VectorField::from_fn(g, |x| {
            let rho = (PI * x[2]).sin().powi(2);
            let drho = PI * (2.0 * PI * x[2]).sin();
            [(k * x[0]).cos() * drho / k, 0.0, (k * x[0]).sin() * rho]
        });
        let v = biot_savart(&omega);
        assert!(ops::divergence(&v).max_abs() < 1e-10);
        let c = ops::curl3(&v);
        let err = (0..3).map(|d| c.c[d].iter().zip(&omega.c[d]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        for e in err {
            assert!(e < 1e-2, "{e}");
        }
        let h = harmonic_part(&v);
        assert!(h[0].abs() < 1e-14 && h[1].abs() < 1e-14);
    }

    #[test]
    fn recover_velocity_examples() {
        let g = grid();
        let bg = Background::tw_constant(g, 2, 0.1, 1.0).unwrap();
        let u = recover_velocity(&VectorField::zeros(g), &bg, 0.0, [0.0, 0.0]);
        assert_eq!(u.at(5), [0.0, 0.0, -1.0]);
        let u = recover_velocity(&VectorField::zeros(g), &bg, 0.0, [1.0, 0.0]);
        assert_eq!(u.at(100), [1.0, 0.0, -1.0]);
    }
}
