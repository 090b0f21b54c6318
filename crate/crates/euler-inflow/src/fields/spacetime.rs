use super::field::{PlaneField, TangentPlane, VectorField};
use super::grid::Grid3;
use super::ops;
use crate::error::FieldError;
use crate::geometry::channel::Wall;

/// Time-derivative stencil at slice `m` of `nt` intervals: centered inside,
/// one-sided second order at the ends. Weights multiply values and are divided by dt.
pub fn time_stencil(nt: usize, m: usize) -> Vec<(usize, f64)> {
    assert!(nt >= 1 && m <= nt);
    if nt == 1 {
        return vec![(0, -1.0), (1, 1.0)];
    }
    if m == 0 {
        vec![(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if m == nt {
        vec![(nt, 1.5), (nt - 1, -2.0), (nt - 2, 0.5)]
    } else {
        vec![(m + 1, 0.5), (m - 1, -0.5)]
    }
}

/// Apply the time stencil to a sequence of equally shaped buffers.
pub fn time_derivative(values: &[&[f64]], dt: f64, m: usize) -> Vec<f64> {
    let nt = values.len() - 1;
    let mut out = vec![0.0; values[0].len()];
    for (s, w) in time_stencil(nt, m) {
        for (o, v) in out.iter_mut().zip(values[s]) {
            *o += w * v / dt;
        }
    }
    out
}

/// Velocity sampled on slices t_m = m dt, m = 0..=nt.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeVelocity {
    pub grid: Grid3,
    pub dt: f64,
    pub slices: Vec<VectorField>,
}

impl SpaceTimeVelocity {
    pub fn new(dt: f64, slices: Vec<VectorField>) -> Result<Self, FieldError> {
        let grid = slices
            .first()
            .ok_or_else(|| FieldError::InvalidGrid("no time slices".into()))?
            .grid;
        if slices.len() < 2 || dt <= 0.0 {
            return Err(FieldError::InvalidGrid("need at least two slices and dt > 0".into()));
        }
        if slices.iter().any(|s| s.grid != grid) {
            return Err(FieldError::GridMismatch("slices on different grids".into()));
        }
        Ok(Self { grid, dt, slices })
    }

    /// Constant-in-time extension of one field.
    pub fn constant(u0: &VectorField, nt: usize, dt: f64) -> Self {
        Self { grid: u0.grid, dt, slices: vec![u0.clone(); nt + 1] }
    }

    pub fn nt(&self) -> usize {
        self.slices.len() - 1
    }
    pub fn t(&self, m: usize) -> f64 {
        m as f64 * self.dt
    }
    pub fn t_final(&self) -> f64 {
        self.nt() as f64 * self.dt
    }

    pub fn component_series(&self, d: usize) -> Vec<&[f64]> {
        self.slices.iter().map(|s| s.c[d].as_slice()).collect()
    }

    /// ∂t u at slice m from the time stencil.
    pub fn time_derivative(&self, m: usize) -> VectorField {
        let mut out = VectorField::zeros(self.grid);
        for d in 0..3 {
            out.c[d] = time_derivative(&self.component_series(d), self.dt, m);
        }
        out
    }

    pub fn tangential_dt(&self, wall: Wall, m: usize) -> TangentPlane {
        let tr: Vec<TangentPlane> = self.slices.iter().map(|s| s.tangential(wall)).collect();
        let xs: Vec<&[f64]> = tr.iter().map(|t| t.x.as_slice()).collect();
        let ys: Vec<&[f64]> = tr.iter().map(|t| t.y.as_slice()).collect();
        TangentPlane {
            grid: self.grid.plane(),
            x: time_derivative(&xs, self.dt, m),
            y: time_derivative(&ys, self.dt, m),
        }
    }

    pub fn normal_dt(&self, wall: Wall, m: usize) -> PlaneField {
        let tr: Vec<PlaneField> = self.slices.iter().map(|s| s.normal(wall)).collect();
        let vs: Vec<&[f64]> = tr.iter().map(|t| t.data.as_slice()).collect();
        PlaneField { grid: self.grid.plane(), data: time_derivative(&vs, self.dt, m) }
    }

    pub fn sub(&self, other: &SpaceTimeVelocity) -> SpaceTimeVelocity {
        SpaceTimeVelocity {
            grid: self.grid,
            dt: self.dt,
            slices: self.slices.iter().zip(&other.slices).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().map(|s| s.max_abs()).fold(0.0, f64::max)
    }

    /// Largest discrete divergence over all slices.
    pub fn max_divergence(&self) -> f64 {
        self.slices.iter().map(|s| ops::divergence(s).max_abs()).fold(0.0, f64::max)
    }
}
