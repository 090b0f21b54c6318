//! Discrete Hölder seminorms over sampled point pairs, used as iteration diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{ScalarField, VectorField};
use super::grid::Grid3;
use super::ops;
use super::spacetime::SpaceTimeVelocity;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Time,
    Space,
}

/// Pair-sampling policy for the spatial seminorm.
#[derive(Clone, Copy, Debug)]
pub struct HolderSampling {
    /// Up to this many grid points every pair is visited; above it, off-axis pairs are sampled.
    pub exhaustive_limit: usize,
    pub seed: u64,
}

impl Default for HolderSampling {
    fn default() -> Self {
        Self { exhaustive_limit: 512, seed: 0x5eed }
    }
}

/// Sup norm plus time and space seminorms of one field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HolderNorm {
    pub alpha: f64,
    pub sup: f64,
    pub time: f64,
    pub space: f64,
}

impl HolderNorm {
    /// Inhomogeneous norm: sup + seminorms.
    pub fn total(&self) -> f64 {
        self.sup + self.time + self.space
    }
    pub fn homogeneous(&self) -> f64 {
        self.time + self.space
    }
}

/// Space-time samples with `ncomp` components interleaved per node.
#[derive(Clone, Debug)]
pub struct SpaceTimeSamples {
    pub grid: Grid3,
    pub dt: f64,
    pub ncomp: usize,
    pub data: Vec<Vec<f64>>,
}

impl SpaceTimeSamples {
    pub fn from_vectors(grid: Grid3, dt: f64, slices: &[VectorField]) -> Self {
        let data = slices
            .iter()
            .map(|s| (0..grid.len()).flat_map(|p| s.at(p)).collect())
            .collect();
        Self { grid, dt, ncomp: 3, data }
    }
    pub fn from_scalars(grid: Grid3, dt: f64, slices: &[ScalarField]) -> Self {
        Self { grid, dt, ncomp: 1, data: slices.iter().map(|s| s.data.clone()).collect() }
    }
    pub fn from_velocity(u: &SpaceTimeVelocity) -> Self {
        Self::from_vectors(u.grid, u.dt, &u.slices)
    }

    #[inline]
    fn dist(&self, a: &[f64], pa: usize, b: &[f64], pb: usize) -> f64 {
        let n = self.ncomp;
        let mut s = 0.0;
        for c in 0..n {
            let d = a[pa * n + c] - b[pb * n + c];
            s += d * d;
        }
        s.sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|s| s.chunks(self.ncomp))
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

fn periodic_gap(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Hölder seminorm along one axis: max |f(p) - f(q)| / d(p,q)^alpha.
pub fn holder_seminorm(f: &SpaceTimeSamples, alpha: f64, axis: Axis, sampling: &HolderSampling) -> f64 {
    match axis {
        Axis::Time => time_seminorm(f, alpha),
        Axis::Space => f.data.iter().map(|s| space_seminorm(f, s, alpha, sampling)).fold(0.0, f64::max),
    }
}

fn time_seminorm(f: &SpaceTimeSamples, alpha: f64) -> f64 {
    let nt = f.data.len() - 1;
    let inv: Vec<f64> = (0..=nt).map(|d| if d == 0 { 0.0 } else { (d as f64 * f.dt).powf(-alpha) }).collect();
    let mut best: f64 = 0.0;
    for p in 0..f.grid.len() {
        for m1 in 0..nt {
            for m2 in m1 + 1..=nt {
                best = best.max(f.dist(&f.data[m1], p, &f.data[m2], p) * inv[m2 - m1]);
            }
        }
    }
    best
}

fn space_seminorm(f: &SpaceTimeSamples, s: &[f64], alpha: f64, sampling: &HolderSampling) -> f64 {
    let g = f.grid;
    let (n1, n2, n3) = (g.n1, g.n2, g.n3);
    let inv_x: Vec<f64> = (0..=n1).map(|d| if d == 0 { 0.0 } else { (d as f64 * g.h1()).powf(-alpha) }).collect();
    let inv_y: Vec<f64> = (0..=n2).map(|d| if d == 0 { 0.0 } else { (d as f64 * g.h2()).powf(-alpha) }).collect();
    let inv_z: Vec<f64> = (0..=n3).map(|d| if d == 0 { 0.0 } else { (d as f64 * g.h3()).powf(-alpha) }).collect();
    let mut best: f64 = 0.0;
    for k in 0..n3 {
        for j in 0..n2 {
            for i1 in 0..n1 {
                for i2 in i1 + 1..n1 {
                    let d = f.dist(s, g.idx(i1, j, k), s, g.idx(i2, j, k));
                    best = best.max(d * inv_x[periodic_gap(i1, i2, n1)]);
                }
            }
        }
        for i in 0..n1 {
            for j1 in 0..n2 {
                for j2 in j1 + 1..n2 {
                    let d = f.dist(s, g.idx(i, j1, k), s, g.idx(i, j2, k));
                    best = best.max(d * inv_y[periodic_gap(j1, j2, n2)]);
                }
            }
        }
    }
    for j in 0..n2 {
        for i in 0..n1 {
            for k1 in 0..n3 {
                for k2 in k1 + 1..n3 {
                    let d = f.dist(s, g.idx(i, j, k1), s, g.idx(i, j, k2));
                    best = best.max(d * inv_z[k2 - k1]);
                }
            }
        }
    }
    let np = g.len();
    let cross = |p: usize, q: usize| -> f64 {
        let (i1, j1, k1) = g.ijk(p);
        let (i2, j2, k2) = g.ijk(q);
        let dx = periodic_gap(i1, i2, n1) as f64 * g.h1();
        let dy = periodic_gap(j1, j2, n2) as f64 * g.h2();
        let dz = k1.abs_diff(k2) as f64 * g.h3();
        let r = (dx * dx + dy * dy + dz * dz).sqrt();
        if r == 0.0 {
            0.0
        } else {
            f.dist(s, p, s, q) / r.powf(alpha)
        }
    };
    if np <= sampling.exhaustive_limit {
        for p in 0..np {
            for q in p + 1..np {
                best = best.max(cross(p, q));
            }
        }
    } else {
        let count = np * (usize::BITS - np.leading_zeros()) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
        for _ in 0..count {
            let p = rng.gen_range(0..np);
            let q = rng.gen_range(0..np);
            best = best.max(cross(p, q));
        }
    }
    best
}

/// Discrete C^alpha norm: sup plus both seminorms.
pub fn holder_norm(f: &SpaceTimeSamples, alpha: f64, sampling: &HolderSampling) -> HolderNorm {
    HolderNorm {
        alpha,
        sup: f.sup(),
        time: holder_seminorm(f, alpha, Axis::Time, sampling),
        space: holder_seminorm(f, alpha, Axis::Space, sampling),
    }
}

/// Velocity C^{beta1} norm plus vorticity C^{beta2} norm.
pub fn x_norm(u: &SpaceTimeVelocity, beta1: f64, beta2: f64, sampling: &HolderSampling) -> f64 {
    let vel = SpaceTimeSamples::from_velocity(u);
    let curls: Vec<VectorField> = u.slices.iter().map(ops::curl3).collect();
    let vort = SpaceTimeSamples::from_vectors(u.grid, u.dt, &curls);
    holder_norm(&vel, beta1, sampling).total() + holder_norm(&vort, beta2, sampling).total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(8, 4, 8, 1.0, 1.0).unwrap()
    }

    #[test]
    fn constant_field_has_zero_seminorms() {
        let g = grid();
        let u = SpaceTimeVelocity::constant(&VectorField::constant(g, [1.0, -2.0, 2.0]), 3, 0.1);
        let n = holder_norm(&SpaceTimeSamples::from_velocity(&u), 0.5, &HolderSampling::default());
        assert_eq!(n.time, 0.0);
        assert_eq!(n.space, 0.0);
        assert!((n.sup - 3.0).abs() < 1e-15);
        assert!((x_norm(&u, 0.5, 0.5, &HolderSampling::default()) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn linear_in_time_is_lipschitz_one() {
        let g = grid();
        let slices: Vec<ScalarField> = (0..5).map(|m| ScalarField::from_fn(g, |_| m as f64 * 0.25)).collect();
        let s = SpaceTimeSamples::from_scalars(g, 0.25, &slices);
        let v = holder_seminorm(&s, 1.0, Axis::Time, &HolderSampling::default());
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_matches_dense_oracle() {
        let n = 64;
        let g = Grid3::new(n, 4, 8, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |p| (2.0 * PI * p[0]).sin());
        let s = SpaceTimeSamples::from_scalars(g, 1.0, &[f.clone(), f]);
        let est = holder_seminorm(&s, 0.5, Axis::Space, &HolderSampling::default());
        let m = 2 * n;
        let h = 1.0 / m as f64;
        let mut oracle: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let d = (b - a).min(m - (b - a)) as f64 * h;
                let v = ((2.0 * PI * a as f64 * h).sin() - (2.0 * PI * b as f64 * h).sin()).abs();
                oracle = oracle.max(v / d.sqrt());
            }
        }
        assert!((est - oracle).abs() / oracle < 0.05, "{est} vs {oracle}");
    }
}
