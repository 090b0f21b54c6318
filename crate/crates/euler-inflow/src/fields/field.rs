use std::ops::{Add, Mul, Sub};

use super::grid::{Grid2, Grid3};
use crate::geometry::channel::Wall;

/// Scalar samples on a `Grid3`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid3,
    pub data: Vec<f64>,
}

/// Cartesian vector samples on a `Grid3`, one buffer per component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: Grid3,
    pub c: [Vec<f64>; 3],
}

/// Scalar samples on a wall plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneField {
    pub grid: Grid2,
    pub data: Vec<f64>,
}

/// Tangent vector field on a horizontal wall, stored by Cartesian (x, y) components.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPlane {
    pub grid: Grid2,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self { grid, data: (0..grid.len()).map(|p| f(grid.point(p))).collect() }
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    /// Volume mean with trapezoid weights in z.
    pub fn mean(&self) -> f64 {
        volume_mean(&self.grid, &self.data)
    }
    pub fn wall(&self, wall: Wall) -> PlaneField {
        let g = self.grid;
        let k = wall.k(&g);
        PlaneField {
            grid: g.plane(),
            data: self.data[k * g.plane_len()..(k + 1) * g.plane_len()].to_vec(),
        }
    }
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl VectorField {
    pub fn zeros(grid: Grid3) -> Self {
        let n = grid.len();
        Self { grid, c: [vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }
    pub fn constant(grid: Grid3, v: [f64; 3]) -> Self {
        let n = grid.len();
        Self { grid, c: [vec![v[0]; n], vec![v[1]; n], vec![v[2]; n]] }
    }
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for p in 0..grid.len() {
            let v = f(grid.point(p));
            for d in 0..3 {
                out.c[d][p] = v[d];
            }
        }
        out
    }
    pub fn from_components(a: ScalarField, b: ScalarField, c: ScalarField) -> Self {
        Self { grid: a.grid, c: [a.data, b.data, c.data] }
    }
    #[inline]
    pub fn at(&self, p: usize) -> [f64; 3] {
        [self.c[0][p], self.c[1][p], self.c[2][p]]
    }
    pub fn component(&self, d: usize) -> ScalarField {
        ScalarField { grid: self.grid, data: self.c[d].clone() }
    }
    /// Largest Euclidean length over the grid.
    pub fn max_norm(&self) -> f64 {
        (0..self.grid.len())
            .map(|p| {
                let v = self.at(p);
                (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }
    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().flat_map(|c| c.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn mean(&self) -> [f64; 3] {
        [
            volume_mean(&self.grid, &self.c[0]),
            volume_mean(&self.grid, &self.c[1]),
            volume_mean(&self.grid, &self.c[2]),
        ]
    }
    /// Tangential (x, y) trace on a wall.
    pub fn tangential(&self, wall: Wall) -> TangentPlane {
        let g = self.grid;
        let r = wall.k(&g) * g.plane_len()..(wall.k(&g) + 1) * g.plane_len();
        TangentPlane { grid: g.plane(), x: self.c[0][r.clone()].to_vec(), y: self.c[1][r].to_vec() }
    }
    /// Normal component u·n on a wall (outward normal).
    pub fn normal(&self, wall: Wall) -> PlaneField {
        let g = self.grid;
        let k = wall.k(&g);
        let s = wall.normal_sign();
        PlaneField {
            grid: g.plane(),
            data: self.c[2][k * g.plane_len()..(k + 1) * g.plane_len()].iter().map(|v| s * v).collect(),
        }
    }
    /// Raw z-component on a wall plane.
    pub fn wall_component(&self, wall: Wall, d: usize) -> PlaneField {
        let g = self.grid;
        let k = wall.k(&g);
        PlaneField { grid: g.plane(), data: self.c[d][k * g.plane_len()..(k + 1) * g.plane_len()].to_vec() }
    }
    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in out.c.iter_mut() {
            c.iter_mut().for_each(|v| *v *= a);
        }
        out
    }
    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        for d in 0..3 {
            for (x, y) in self.c[d].iter_mut().zip(&other.c[d]) {
                *x += a * y;
            }
        }
    }
    pub fn add_constant(&mut self, v: [f64; 3]) {
        for d in 0..3 {
            self.c[d].iter_mut().for_each(|x| *x += v[d]);
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, a: f64) -> VectorField {
        self.scale(a)
    }
}

impl PlaneField {
    pub fn zeros(grid: Grid2) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }
    pub fn constant(grid: Grid2, v: f64) -> Self {
        Self { grid, data: vec![v; grid.len()] }
    }
    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid,
            data: (0..grid.len())
                .map(|p| {
                    let (x, y) = grid.xy(p);
                    f(x, y)
                })
                .collect(),
        }
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn min(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }
    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
    /// Trapezoid (= rectangle, periodic) integral over the plane.
    pub fn integral(&self) -> f64 {
        self.mean() * self.grid.area()
    }
    pub fn zip_with(&self, other: &PlaneField, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl TangentPlane {
    pub fn zeros(grid: Grid2) -> Self {
        Self { grid, x: vec![0.0; grid.len()], y: vec![0.0; grid.len()] }
    }
    pub fn constant(grid: Grid2, v: [f64; 2]) -> Self {
        Self { grid, x: vec![v[0]; grid.len()], y: vec![v[1]; grid.len()] }
    }
    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut out = Self::zeros(grid);
        for p in 0..grid.len() {
            let (x, y) = grid.xy(p);
            let v = f(x, y);
            out.x[p] = v[0];
            out.y[p] = v[1];
        }
        out
    }
    pub fn max_norm(&self) -> f64 {
        self.x.iter().zip(&self.y).map(|(a, b)| (a * a + b * b).sqrt()).fold(0.0, f64::max)
    }
    pub fn dot(&self, other: &TangentPlane) -> PlaneField {
        PlaneField {
            grid: self.grid,
            data: (0..self.x.len()).map(|p| self.x[p] * other.x[p] + self.y[p] * other.y[p]).collect(),
        }
    }
    pub fn scaled_by(&self, s: &PlaneField) -> TangentPlane {
        TangentPlane {
            grid: self.grid,
            x: self.x.iter().zip(&s.data).map(|(a, b)| a * b).collect(),
            y: self.y.iter().zip(&s.data).map(|(a, b)| a * b).collect(),
        }
    }
    pub fn combine(&self, a: f64, other: &TangentPlane, b: f64) -> TangentPlane {
        TangentPlane {
            grid: self.grid,
            x: self.x.iter().zip(&other.x).map(|(p, q)| a * p + b * q).collect(),
            y: self.y.iter().zip(&other.y).map(|(p, q)| a * p + b * q).collect(),
        }
    }
    pub fn mean(&self) -> [f64; 2] {
        let n = self.x.len() as f64;
        [self.x.iter().sum::<f64>() / n, self.y.iter().sum::<f64>() / n]
    }
}

/// Volume mean with trapezoid weights in z and uniform weights in the plane.
pub fn volume_mean(grid: &Grid3, data: &[f64]) -> f64 {
    let w = grid.z_weights();
    let np = grid.plane_len();
    let mut total = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let s: f64 = data[k * np..(k + 1) * np].iter().sum();
        total += wk * s;
    }
    total / np as f64
}

/// Volume integral with the same quadrature as `volume_mean`.
pub fn volume_integral(grid: &Grid3, data: &[f64]) -> f64 {
    volume_mean(grid, data) * grid.volume()
}
