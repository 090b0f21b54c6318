//! Volume derivatives: Fourier in x and y, second-order differences in z.

use super::field::{ScalarField, VectorField};
use super::grid::Grid3;
use super::spectral;

pub fn dx_raw(g: &Grid3, f: &[f64]) -> Vec<f64> {
    let np = g.plane_len();
    let mut out = vec![0.0; f.len()];
    spectral::fourier(g.n1, g.l1).diff_lines(f, &mut out);
    debug_assert_eq!(f.len(), np * g.n3);
    out
}

pub fn dy_raw(g: &Grid3, f: &[f64]) -> Vec<f64> {
    let np = g.plane_len();
    let pg = g.plane();
    let mut out = vec![0.0; f.len()];
    for k in 0..g.n3 {
        spectral::diff_y(&pg, &f[k * np..(k + 1) * np], &mut out[k * np..(k + 1) * np]);
    }
    out
}

/// Centered differences inside, one-sided second order at the walls.
pub fn dz_raw(g: &Grid3, f: &[f64]) -> Vec<f64> {
    let np = g.plane_len();
    let n = g.n3;
    let inv = 1.0 / (2.0 * g.h3());
    let mut out = vec![0.0; f.len()];
    for p in 0..np {
        let v = |k: usize| f[k * np + p];
        out[p] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv;
        for k in 1..n - 1 {
            out[k * np + p] = (v(k + 1) - v(k - 1)) * inv;
        }
        out[(n - 1) * np + p] = (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) * inv;
    }
    out
}

/// The z-difference stencil applied to one complex or real profile.
pub fn dz_profile<T>(f: &[T], h: f64) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = f.len();
    let inv = 1.0 / (2.0 * h);
    let mut out = Vec::with_capacity(n);
    out.push((f[1] * 4.0 - f[0] * 3.0 - f[2]) * inv);
    for k in 1..n - 1 {
        out.push((f[k + 1] - f[k - 1]) * inv);
    }
    out.push((f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * inv);
    out
}

pub fn dx(f: &ScalarField) -> ScalarField {
    ScalarField { grid: f.grid, data: dx_raw(&f.grid, &f.data) }
}
pub fn dy(f: &ScalarField) -> ScalarField {
    ScalarField { grid: f.grid, data: dy_raw(&f.grid, &f.data) }
}
pub fn dz(f: &ScalarField) -> ScalarField {
    ScalarField { grid: f.grid, data: dz_raw(&f.grid, &f.data) }
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let g = f.grid;
    VectorField { grid: g, c: [dx_raw(&g, &f.data), dy_raw(&g, &f.data), dz_raw(&g, &f.data)] }
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let g = v.grid;
    let a = dx_raw(&g, &v.c[0]);
    let b = dy_raw(&g, &v.c[1]);
    let c = dz_raw(&g, &v.c[2]);
    ScalarField { grid: g, data: (0..g.len()).map(|p| a[p] + b[p] + c[p]).collect() }
}

pub fn curl3(v: &VectorField) -> VectorField {
    let g = v.grid;
    let wy_z = dz_raw(&g, &v.c[1]);
    let wz_y = dy_raw(&g, &v.c[2]);
    let wx_z = dz_raw(&g, &v.c[0]);
    let wz_x = dx_raw(&g, &v.c[2]);
    let wy_x = dx_raw(&g, &v.c[1]);
    let wx_y = dy_raw(&g, &v.c[0]);
    let n = g.len();
    VectorField {
        grid: g,
        c: [
            (0..n).map(|p| wz_y[p] - wy_z[p]).collect(),
            (0..n).map(|p| wx_z[p] - wz_x[p]).collect(),
            (0..n).map(|p| wy_x[p] - wx_y[p]).collect(),
        ],
    }
}

/// Velocity gradient, entry `3*i + j` holding ∂_j v_i.
pub fn grad_tensor(v: &VectorField) -> [Vec<f64>; 9] {
    let g = v.grid;
    let mut out: [Vec<f64>; 9] = Default::default();
    for i in 0..3 {
        out[3 * i] = dx_raw(&g, &v.c[i]);
        out[3 * i + 1] = dy_raw(&g, &v.c[i]);
        out[3 * i + 2] = dz_raw(&g, &v.c[i]);
    }
    out
}

/// (a·∇)b with the discrete gradient of b.
pub fn advect(a: &VectorField, b: &VectorField) -> VectorField {
    let gb = grad_tensor(b);
    let mut out = VectorField::zeros(a.grid);
    for p in 0..a.grid.len() {
        let av = a.at(p);
        for i in 0..3 {
            out.c[i][p] = av[0] * gb[3 * i][p] + av[1] * gb[3 * i + 1][p] + av[2] * gb[3 * i + 2][p];
        }
    }
    out
}

pub fn cross(a: &VectorField, b: &VectorField) -> VectorField {
    let mut out = VectorField::zeros(a.grid);
    for p in 0..a.grid.len() {
        let (u, v) = (a.at(p), b.at(p));
        out.c[0][p] = u[1] * v[2] - u[2] * v[1];
        out.c[1][p] = u[2] * v[0] - u[0] * v[2];
        out.c[2][p] = u[0] * v[1] - u[1] * v[0];
    }
    out
}

/// Matrix infinity norm (max absolute row sum) of the gradient, maximized over the grid.
pub fn grad_sup_norm(grad: &[Vec<f64>; 9]) -> f64 {
    let n = grad[0].len();
    (0..n)
        .map(|p| {
            (0..3)
                .map(|i| grad[3 * i][p].abs() + grad[3 * i + 1][p].abs() + grad[3 * i + 2][p].abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(16, 8, 17, 1.0, 2.0).unwrap()
    }

    #[test]
    fn divergence_of_sine() {
        let g = grid();
        let v = VectorField::from_fn(g, |p| [(2.0 * PI * p[0]).sin(), 0.0, 0.0]);
        let d = divergence(&v);
        for p in 0..g.len() {
            let x = g.point(p)[0];
            assert!((d.data[p] - 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn curl_of_vertical_sine() {
        let g = grid();
        let v = VectorField::from_fn(g, |p| [0.0, 0.0, (2.0 * PI * p[0]).sin()]);
        let w = curl3(&v);
        for p in 0..g.len() {
            let x = g.point(p)[0];
            assert!(w.c[0][p].abs() < 1e-12);
            assert!((w.c[1][p] + 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-11);
            assert!(w.c[2][p].abs() < 1e-12);
        }
    }

    #[test]
    fn div_curl_vanishes_discretely() {
        let g = grid();
        let w = VectorField::from_fn(g, |p| {
            let (x, y, z) = (p[0], p[1], p[2]);
            [
                (2.0 * PI * x).sin() * z * z,
                (PI * y).cos() * (3.0 * z).sin(),
                (2.0 * PI * x + PI * y).cos() * z,
            ]
        });
        assert!(divergence(&curl3(&w)).max_abs() < 1e-10);
    }

    #[test]
    fn dz_is_second_order() {
        let mut errs = vec![];
        for n3 in [17, 33] {
            let g = Grid3::new(4, 4, n3, 1.0, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |p| (2.0 * p[2]).sin());
            let d = dz(&f);
            let e = (0..g.len())
                .map(|p| (d.data[p] - 2.0 * (2.0 * g.point(p)[2]).cos()).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] / errs[1] > 3.5);
    }
}
