//! Surface gradient, divergence and curl on a sampled patch.
//!
//! Tangent fields are stored by frame components (v¹, v²) along (τ₁, τ₂).
//! Periodic parameter directions are differentiated spectrally, the others
//! with centered fourth-order differences (one-sided near the ends).

use super::patch::{Frame, SurfacePatch};
use crate::error::GeometryError;
use crate::fields::spectral::{fourier, transpose};

/// Smallest line length accepted by the fourth-order stencil.
pub const MIN_FD_POINTS: usize = 5;
/// Smallest line length accepted for Fourier differentiation.
pub const MIN_SPECTRAL_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct PatchTangent {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

impl PatchTangent {
    pub fn zeros(n: usize) -> Self {
        Self { v1: vec![0.0; n], v2: vec![0.0; n] }
    }
    pub fn max_norm(&self) -> f64 {
        self.v1.iter().zip(&self.v2).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }
}

/// A patch sampled on an m₁ × m₂ parameter grid, index `j * m1 + i`.
#[derive(Clone, Debug)]
pub struct PatchGrid {
    pub patch: SurfacePatch,
    pub m1: usize,
    pub m2: usize,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    pub frames: Vec<Frame>,
    steps: [f64; 2],
}

fn nodes(range: (f64, f64), m: usize, periodic: bool) -> Vec<f64> {
    let d = if periodic { m } else { m - 1 };
    let h = (range.1 - range.0) / d as f64;
    (0..m).map(|i| range.0 + i as f64 * h).collect()
}

impl PatchGrid {
    pub fn new(patch: SurfacePatch, m1: usize, m2: usize) -> Result<Self, GeometryError> {
        patch.validate()?;
        let per = patch.periodic();
        for (m, p) in [(m1, per[0]), (m2, per[1])] {
            let need = if p { MIN_SPECTRAL_POINTS } else { MIN_FD_POINTS };
            if m < need {
                return Err(GeometryError::GridTooCoarse(format!("{m} points, stencil needs {need}")));
            }
        }
        let r = patch.ranges();
        let xi1 = nodes(r[0], m1, per[0]);
        let xi2 = nodes(r[1], m2, per[1]);
        let n = m1 * m2;
        let (mut a1, mut a2, mut k1, mut k2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut frames = Vec::with_capacity(n);
        for j in 0..m2 {
            for i in 0..m1 {
                let xi = [xi1[i], xi2[j]];
                let p = j * m1 + i;
                let a = patch.metric(xi);
                let k = patch.curvatures(xi);
                a1[p] = a[0];
                a2[p] = a[1];
                k1[p] = k[0];
                k2[p] = k[1];
                frames.push(patch.frame(xi));
            }
        }
        let steps = [xi1[1] - xi1[0], xi2[1] - xi2[0]];
        Ok(Self { patch, m1, m2, xi1, xi2, a1, a2, k1, k2, frames, steps })
    }

    pub fn len(&self) -> usize {
        self.m1 * self.m2
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn from_fn(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.m2 {
            for i in 0..self.m1 {
                out.push(f([self.xi1[i], self.xi2[j]]));
            }
        }
        out
    }

    pub fn xi(&self, p: usize) -> [f64; 2] {
        [self.xi1[p % self.m1], self.xi2[p / self.m1]]
    }

    /// Derivative along ξ₁ (contiguous lines).
    pub fn d1(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        self.diff_lines(f, &mut out, 0, self.m1);
        out
    }

    /// Derivative along ξ₂.
    pub fn d2(&self, f: &[f64]) -> Vec<f64> {
        let (m1, m2) = (self.m1, self.m2);
        let mut t = vec![0.0; f.len()];
        transpose(f, &mut t, m1, m2);
        let mut dt = vec![0.0; f.len()];
        self.diff_lines(&t, &mut dt, 1, m2);
        let mut out = vec![0.0; f.len()];
        transpose(&dt, &mut out, m2, m1);
        out
    }

    fn diff_lines(&self, f: &[f64], out: &mut [f64], dir: usize, m: usize) {
        if self.patch.periodic()[dir] {
            let period = self.steps[dir] * m as f64;
            fourier(m, period).diff_lines(f, out);
        } else {
            for (line, o) in f.chunks(m).zip(out.chunks_mut(m)) {
                fd4_line(line, self.steps[dir], o);
            }
        }
    }

    pub fn grad(&self, f: &[f64]) -> PatchTangent {
        let d1 = self.d1(f);
        let d2 = self.d2(f);
        PatchTangent {
            v1: d1.iter().zip(&self.a1).map(|(d, a)| d / a).collect(),
            v2: d2.iter().zip(&self.a2).map(|(d, a)| d / a).collect(),
        }
    }

    pub fn div(&self, v: &PatchTangent) -> Vec<f64> {
        let w1: Vec<f64> = v.v1.iter().zip(&self.a2).map(|(v, a)| a * v).collect();
        let w2: Vec<f64> = v.v2.iter().zip(&self.a1).map(|(v, a)| a * v).collect();
        let d1 = self.d1(&w1);
        let d2 = self.d2(&w2);
        (0..self.len()).map(|p| (d1[p] + d2[p]) / (self.a1[p] * self.a2[p])).collect()
    }

    /// Rotation about the normal: (v¹, v²) ↦ (−v², v¹).
    pub fn perp(&self, v: &PatchTangent) -> PatchTangent {
        PatchTangent { v1: v.v2.iter().map(|x| -x).collect(), v2: v.v1.clone() }
    }

    pub fn curl(&self, v: &PatchTangent) -> Vec<f64> {
        self.div(&self.perp(v)).into_iter().map(|x| -x).collect()
    }

    /// Directional derivative of the normal: κ₁v¹τ₁ + κ₂v²τ₂.
    pub fn shape_apply(&self, v: &PatchTangent) -> PatchTangent {
        PatchTangent {
            v1: v.v1.iter().zip(&self.k1).map(|(v, k)| k * v).collect(),
            v2: v.v2.iter().zip(&self.k2).map(|(v, k)| k * v).collect(),
        }
    }

    /// Tensor-product trapezoid of f over the surface area element.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let per = self.patch.periodic();
        let w = |i: usize, m: usize, periodic: bool| {
            if !periodic && (i == 0 || i == m - 1) {
                0.5
            } else {
                1.0
            }
        };
        let mut s = 0.0;
        for j in 0..self.m2 {
            let wj = w(j, self.m2, per[1]);
            for i in 0..self.m1 {
                let p = j * self.m1 + i;
                s += wj * w(i, self.m1, per[0]) * self.a1[p] * self.a2[p] * f[p];
            }
        }
        s * self.steps[0] * self.steps[1]
    }

    pub fn to_cartesian(&self, v: &PatchTangent, p: usize) -> [f64; 3] {
        let f = &self.frames[p];
        std::array::from_fn(|d| v.v1[p] * f.t1[d] + v.v2[p] * f.t2[d])
    }

    /// Frame components of Cartesian tangent vectors given per node.
    pub fn from_cartesian(&self, v: &[[f64; 3]]) -> Result<PatchTangent, GeometryError> {
        let mut out = PatchTangent::zeros(self.len());
        for (p, (x, f)) in v.iter().zip(&self.frames).enumerate() {
            let vn = x[0] * f.n[0] + x[1] * f.n[1] + x[2] * f.n[2];
            let scale = 1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if vn.abs() > super::pointwise::TANGENT_TOL * scale {
                return Err(GeometryError::NotTangent(vn));
            }
            out.v1[p] = x[0] * f.t1[0] + x[1] * f.t1[1] + x[2] * f.t1[2];
            out.v2[p] = x[0] * f.t2[0] + x[1] * f.t2[1] + x[2] * f.t2[2];
        }
        Ok(out)
    }
}

fn fd4_line(f: &[f64], h: f64, out: &mut [f64]) {
    let m = f.len();
    let s = 1.0 / (12.0 * h);
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    for i in 2..m - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    }
    out[m - 2] = (3.0 * f[m - 1] + 10.0 * f[m - 2] - 18.0 * f[m - 3] + 6.0 * f[m - 4] - f[m - 5]) * s;
    out[m - 1] = (25.0 * f[m - 1] - 48.0 * f[m - 2] + 36.0 * f[m - 3] - 16.0 * f[m - 4] + 3.0 * f[m - 5]) * s;
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn flat(n: usize) -> PatchGrid {
        PatchGrid::new(SurfacePatch::FlatPeriodic { l1: 1.0, l2: 2.0, height: 1.0 }, n, n).unwrap()
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let s = SurfacePatch::Sphere { radius: 1.0, theta_min: 0.5, theta_max: 2.5 };
        assert!(matches!(PatchGrid::new(s, 4, 8), Err(GeometryError::GridTooCoarse(_))));
    }

    #[test]
    fn flat_gradient_and_divergence_examples() {
        let g = flat(16);
        let c = g.from_fn(|_| 3.0);
        assert!(g.grad(&c).max_norm() < 1e-13);
        let s = g.from_fn(|x| (2.0 * PI * x[0]).sin());
        let gr = g.grad(&s);
        let div = g.div(&PatchTangent { v1: s.clone(), v2: vec![0.0; g.len()] });
        let curl = g.curl(&PatchTangent { v1: vec![0.0; g.len()], v2: s.clone() });
        for p in 0..g.len() {
            let e = 2.0 * PI * (2.0 * PI * g.xi(p)[0]).cos();
            assert!((gr.v1[p] - e).abs() < 1e-11);
            assert!((div[p] - e).abs() < 1e-11);
            assert!((curl[p] - e).abs() < 1e-11);
        }
        assert!(g.shape_apply(&gr).max_norm() == 0.0);
    }

    #[test]
    fn fd4_is_fourth_order() {
        let err = |m: usize| {
            let h = 1.0 / (m - 1) as f64;
            let f: Vec<f64> = (0..m).map(|i| (1.3 * i as f64 * h).exp()).collect();
            let mut o = vec![0.0; m];
            fd4_line(&f, h, &mut o);
            (0..m).map(|i| (o[i] - 1.3 * (1.3 * i as f64 * h).exp()).abs()).fold(0.0, f64::max)
        };
        let r = err(17) / err(33);
        assert!(r > 12.0, "ratio {r}");
    }

    fn sphere(m: usize) -> PatchGrid {
        PatchGrid::new(SurfacePatch::Sphere { radius: 1.0, theta_min: 0.4, theta_max: 2.6 }, m, 2 * m).unwrap()
    }

    #[test]
    fn sphere_curl_of_gradient_vanishes() {
        let g = sphere(64);
        let f = g.from_fn(|x| x[0].cos() * (1.0 + 0.3 * x[1].sin()));
        let c = g.curl(&g.grad(&f));
        let inner = c
            .iter()
            .enumerate()
            .filter(|(p, _)| {
                let i = p % g.m1;
                i > 2 && i < g.m1 - 3
            })
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        assert!(inner < 1e-6, "{inner}");
    }

    #[test]
    fn shape_operator_matches_normal_derivative() {
        let cases = [
            (SurfacePatch::Sphere { radius: 1.0, theta_min: 0.4, theta_max: 2.6 }, [0.3, -0.8]),
            (SurfacePatch::Cylinder { radius: 2.5, length: 1.0 }, [1.0, 0.0]),
            (SurfacePatch::Cylinder { radius: 2.5, length: 1.0 }, [0.0, 1.0]),
        ];
        for (patch, v) in cases {
            let g = PatchGrid::new(patch, 8, 8).unwrap();
            let p = 3 * 8 + 4;
            let xi = g.xi(p);
            let a = patch.metric(xi);
            // move along v: dξ_i = v_i / a_i
            let e = 1e-6;
            let fwd = patch.frame([xi[0] + e * v[0] / a[0], xi[1] + e * v[1] / a[1]]).n;
            let bwd = patch.frame([xi[0] - e * v[0] / a[0], xi[1] - e * v[1] / a[1]]).n;
            let dn: [f64; 3] = std::array::from_fn(|d| (fwd[d] - bwd[d]) / (2.0 * e));
            let mut t = PatchTangent::zeros(g.len());
            t.v1[p] = v[0];
            t.v2[p] = v[1];
            let s = g.to_cartesian(&g.shape_apply(&t), p);
            for d in 0..3 {
                assert!((s[d] - dn[d]).abs() < 1e-8, "{patch:?} {s:?} {dn:?}");
            }
        }
    }
}
