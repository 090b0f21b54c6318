//! Tricubic Lagrange interpolation in space and cubic Hermite interpolation in time.

use super::field::{ScalarField, VectorField};
use super::grid::{Grid2, Grid3};
use super::spacetime::time_stencil;
use crate::error::FieldError;

/// Four-point Lagrange weights for nodes 0..3 at local coordinate `s`.
#[inline]
pub fn lagrange4(s: f64) -> [f64; 4] {
    let (a, b, c, d) = (s, s - 1.0, s - 2.0, s - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

/// Stencil start (may be negative; wrapped by caller) and weights on a periodic axis.
#[inline]
fn periodic_stencil(x: f64, h: f64) -> (i64, [f64; 4]) {
    let u = x / h;
    let i0 = u.floor();
    (i0 as i64 - 1, lagrange4(u - i0 + 1.0))
}

/// Stencil start and weights on the wall-bounded axis, shifted one-sided near walls.
#[inline]
fn wall_stencil(z: f64, n3: usize) -> (usize, [f64; 4]) {
    let u = z.clamp(0.0, 1.0) * (n3 - 1) as f64;
    let k0 = (u.floor() as i64 - 1).clamp(0, n3 as i64 - 4) as usize;
    (k0, lagrange4(u - k0 as f64))
}

/// Precomputed stencil for one spatial point.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    ix: [usize; 4],
    iy: [usize; 4],
    kz: usize,
    wx: [f64; 4],
    wy: [f64; 4],
    wz: [f64; 4],
}

impl Stencil {
    #[inline]
    pub fn new(g: &Grid3, x: [f64; 3]) -> Self {
        let (i0, wx) = periodic_stencil(x[0], g.h1());
        let (j0, wy) = periodic_stencil(x[1], g.h2());
        let (kz, wz) = wall_stencil(x[2], g.n3);
        let (n1, n2) = (g.n1 as i64, g.n2 as i64);
        let mut ix = [0; 4];
        let mut iy = [0; 4];
        for a in 0..4 {
            ix[a] = (i0 + a as i64).rem_euclid(n1) as usize;
            iy[a] = (j0 + a as i64).rem_euclid(n2) as usize;
        }
        Self { ix, iy, kz, wx, wy, wz }
    }
}

/// Interleaved multi-channel samples on a `Grid3`, laid out for fast interpolation.
#[derive(Clone, Debug)]
pub struct Packed<const N: usize> {
    pub grid: Grid3,
    pub data: Vec<[f64; N]>,
}

impl<const N: usize> Packed<N> {
    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, data: vec![[0.0; N]; grid.len()] }
    }

    pub fn from_channels(grid: Grid3, channels: &[&[f64]]) -> Self {
        let mut out = Self::zeros(grid);
        for (c, ch) in channels.iter().enumerate().take(N) {
            for (node, v) in out.data.iter_mut().zip(ch.iter()) {
                node[c] = *v;
            }
        }
        out
    }

    #[inline]
    pub fn eval_with(&self, st: &Stencil) -> [f64; N] {
        let g = &self.grid;
        let np = g.plane_len();
        let mut acc = [0.0; N];
        for c in 0..4 {
            let kbase = (st.kz + c) * np;
            for b in 0..4 {
                let row = kbase + st.iy[b] * g.n1;
                let wyz = st.wz[c] * st.wy[b];
                for a in 0..4 {
                    let w = wyz * st.wx[a];
                    let node = &self.data[row + st.ix[a]];
                    for q in 0..N {
                        acc[q] += w * node[q];
                    }
                }
            }
        }
        acc
    }

    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> [f64; N] {
        self.eval_with(&Stencil::new(&self.grid, x))
    }

    /// Channels `lo..lo+M` only.
    #[inline]
    pub fn eval_channels<const M: usize>(&self, st: &Stencil, lo: usize) -> [f64; M] {
        let g = &self.grid;
        let np = g.plane_len();
        let mut acc = [0.0; M];
        for c in 0..4 {
            let kbase = (st.kz + c) * np;
            for b in 0..4 {
                let row = kbase + st.iy[b] * g.n1;
                let wyz = st.wz[c] * st.wy[b];
                for a in 0..4 {
                    let w = wyz * st.wx[a];
                    let node = &self.data[row + st.ix[a]];
                    for q in 0..M {
                        acc[q] += w * node[lo + q];
                    }
                }
            }
        }
        acc
    }

    /// Linear combination sum_i a_i * fields_i, node by node.
    pub fn combine(grid: Grid3, terms: &[(f64, &Packed<N>)]) -> Self {
        let mut out = Self::zeros(grid);
        for (a, f) in terms {
            if *a == 0.0 {
                continue;
            }
            for (o, v) in out.data.iter_mut().zip(&f.data) {
                for q in 0..N {
                    o[q] += a * v[q];
                }
            }
        }
        out
    }
}

/// Hermite basis on [0,1]: (h00, h10, h01, h11).
#[inline]
pub fn hermite(theta: f64) -> [f64; 4] {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    [2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + theta, -2.0 * t3 + 3.0 * t2, t3 - t2]
}

/// Slices with finite-difference slopes, interpolated by cubic Hermite in time.
#[derive(Clone, Debug)]
pub struct PackedSeries<const N: usize> {
    pub dt: f64,
    pub nodes: Vec<Packed<N>>,
    pub slopes: Vec<Packed<N>>,
}

impl<const N: usize> PackedSeries<N> {
    pub fn new(dt: f64, nodes: Vec<Packed<N>>) -> Self {
        let nt = nodes.len() - 1;
        let grid = nodes[0].grid;
        let slopes = (0..=nt)
            .map(|m| {
                let terms: Vec<(f64, &Packed<N>)> =
                    time_stencil(nt, m).into_iter().map(|(s, w)| (w / dt, &nodes[s])).collect();
                Packed::combine(grid, &terms)
            })
            .collect();
        Self { dt, nodes, slopes }
    }

    pub fn grid(&self) -> Grid3 {
        self.nodes[0].grid
    }
    pub fn nt(&self) -> usize {
        self.nodes.len() - 1
    }
    pub fn t_final(&self) -> f64 {
        self.nt() as f64 * self.dt
    }

    /// Interval index and Hermite weights (value-node and slope-node) at time t (clamped).
    #[inline]
    pub fn time_weights(&self, t: f64) -> (usize, [f64; 4]) {
        let nt = self.nt();
        let u = (t / self.dt).clamp(0.0, nt as f64);
        let m = (u.floor() as usize).min(nt - 1);
        let h = hermite(u - m as f64);
        (m, [h[0], h[1] * self.dt, h[2], h[3] * self.dt])
    }

    /// Whole-grid snapshot at time t (clamped to [0, T]).
    pub fn snapshot(&self, t: f64) -> Packed<N> {
        let (m, w) = self.time_weights(t);
        Packed::combine(
            self.grid(),
            &[(w[0], &self.nodes[m]), (w[1], &self.slopes[m]), (w[2], &self.nodes[m + 1]), (w[3], &self.slopes[m + 1])],
        )
    }

    /// Point value at (t, x) with t clamped to [0, T].
    pub fn sample(&self, t: f64, x: [f64; 3]) -> [f64; N] {
        let (m, w) = self.time_weights(t);
        let st = Stencil::new(&self.grid(), x);
        let a = self.nodes[m].eval_with(&st);
        let b = self.slopes[m].eval_with(&st);
        let c = self.nodes[m + 1].eval_with(&st);
        let d = self.slopes[m + 1].eval_with(&st);
        let mut out = [0.0; N];
        for q in 0..N {
            out[q] = w[0] * a[q] + w[1] * b[q] + w[2] * c[q] + w[3] * d[q];
        }
        out
    }

    /// Like `sample` but rejects times outside [0, T].
    pub fn interpolate(&self, t: f64, x: [f64; 3]) -> Result<[f64; N], FieldError> {
        let tf = self.t_final();
        if !(-1e-12..=tf + 1e-12).contains(&t) {
            return Err(FieldError::TimeOutOfRange { t, t_final: tf });
        }
        Ok(self.sample(t, x))
    }
}

/// Interpolate a scalar space-time field given as slices.
pub fn interpolate_scalar(slices: &[ScalarField], dt: f64, t: f64, x: [f64; 3]) -> Result<f64, FieldError> {
    let nodes = slices.iter().map(|s| Packed::<1>::from_channels(s.grid, &[&s.data])).collect();
    Ok(PackedSeries::new(dt, nodes).interpolate(t, x)?[0])
}

/// Interpolate a vector space-time field given as slices.
pub fn interpolate_vector(slices: &[VectorField], dt: f64, t: f64, x: [f64; 3]) -> Result<[f64; 3], FieldError> {
    PackedSeries::new(dt, slices.iter().map(pack_vector).collect()).interpolate(t, x)
}

pub fn pack_vector(v: &VectorField) -> Packed<3> {
    Packed::from_channels(v.grid, &[&v.c[0], &v.c[1], &v.c[2]])
}

/// Bicubic periodic interpolation of plane channels with Hermite time interpolation.
#[derive(Clone, Debug)]
pub struct PlaneSeries<const N: usize> {
    pub grid: Grid2,
    pub dt: f64,
    nodes: Vec<Vec<[f64; N]>>,
    slopes: Vec<Vec<[f64; N]>>,
}

impl<const N: usize> PlaneSeries<N> {
    pub fn new(grid: Grid2, dt: f64, nodes: Vec<Vec<[f64; N]>>) -> Self {
        let nt = nodes.len() - 1;
        let slopes = (0..=nt)
            .map(|m| {
                let mut s = vec![[0.0; N]; grid.len()];
                for (i, w) in time_stencil(nt, m) {
                    for (o, v) in s.iter_mut().zip(&nodes[i]) {
                        for q in 0..N {
                            o[q] += w / dt * v[q];
                        }
                    }
                }
                s
            })
            .collect();
        Self { grid, dt, nodes, slopes }
    }

    pub fn nt(&self) -> usize {
        self.nodes.len() - 1
    }

    fn eval_plane(&self, data: &[[f64; N]], x: f64, y: f64) -> [f64; N] {
        let g = &self.grid;
        let (i0, wx) = periodic_stencil(x, g.h1());
        let (j0, wy) = periodic_stencil(y, g.h2());
        let mut acc = [0.0; N];
        for b in 0..4 {
            let j = (j0 + b as i64).rem_euclid(g.n2 as i64) as usize;
            for a in 0..4 {
                let i = (i0 + a as i64).rem_euclid(g.n1 as i64) as usize;
                let w = wx[a] * wy[b];
                let node = &data[j * g.n1 + i];
                for q in 0..N {
                    acc[q] += w * node[q];
                }
            }
        }
        acc
    }

    /// Exact slice value at a grid node.
    pub fn node(&self, m: usize, p: usize) -> [f64; N] {
        self.nodes[m][p]
    }

    pub fn sample(&self, t: f64, x: f64, y: f64) -> [f64; N] {
        let nt = self.nt();
        let u = (t / self.dt).clamp(0.0, nt as f64);
        let m = (u.floor() as usize).min(nt - 1);
        let h = hermite(u - m as f64);
        let a = self.eval_plane(&self.nodes[m], x, y);
        let b = self.eval_plane(&self.slopes[m], x, y);
        let c = self.eval_plane(&self.nodes[m + 1], x, y);
        let d = self.eval_plane(&self.slopes[m + 1], x, y);
        let mut out = [0.0; N];
        for q in 0..N {
            out[q] = h[0] * a[q] + h[1] * self.dt * b[q] + h[2] * c[q] + h[3] * self.dt * d[q];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reproduces_cubics_in_space() {
        let g = Grid3::new(8, 8, 9, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |p| p[2].powi(3) - 2.0 * p[2] + 0.5);
        let pk = Packed::<1>::from_channels(g, &[&f.data]);
        for z in [0.0, 0.03, 0.51, 0.97, 1.0] {
            let v = pk.eval([0.3, 0.7, z])[0];
            assert!((v - (z.powi(3) - 2.0 * z + 0.5)).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_at_nodes() {
        let g = Grid3::new(8, 8, 9, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |p| (2.0 * PI * p[0]).sin() + p[1] * p[2]);
        let pk = Packed::<1>::from_channels(g, &[&f.data]);
        for p in (0..g.len()).step_by(7) {
            assert!((pk.eval(g.point(p))[0] - f.data[p]).abs() < 1e-13);
        }
    }

    #[test]
    fn fourth_order_on_sine() {
        let mut errs = vec![];
        for n in [16, 32] {
            let g = Grid3::new(n, 4, 9, 1.0, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |p| (2.0 * PI * p[0]).sin());
            let pk = Packed::<1>::from_channels(g, &[&f.data]);
            let e = (0..50)
                .map(|i| {
                    let x = 0.0137 + i as f64 * 0.0191;
                    (pk.eval([x, 0.2, 0.4])[0] - (2.0 * PI * x).sin()).abs()
                })
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] / errs[1] > 12.0, "{errs:?}");
    }

    #[test]
    fn time_range_is_checked() {
        let g = Grid3::new(4, 4, 8, 1.0, 1.0).unwrap();
        let f = vec![ScalarField::from_fn(g, |_| 1.0); 3];
        assert!(interpolate_scalar(&f, 0.5, 1.5, [0.0; 3]).is_err());
        assert!((interpolate_scalar(&f, 0.5, 0.7, [0.1, 0.2, 0.3]).unwrap() - 1.0).abs() < 1e-14);
    }
}
