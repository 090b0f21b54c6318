use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Node-centered channel grid: periodic in x and y, walls included in z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub l1: f64,
    pub l2: f64,
}

impl Grid3 {
    pub fn new(n1: usize, n2: usize, n3: usize, l1: f64, l2: f64) -> Result<Self, FieldError> {
        if !n1.is_power_of_two() || !n2.is_power_of_two() || n1 < 4 || n2 < 4 {
            return Err(FieldError::InvalidGrid(format!(
                "n1={n1}, n2={n2} must be powers of two >= 4"
            )));
        }
        if n3 < 8 {
            return Err(FieldError::InvalidGrid(format!("n3={n3} must be at least 8")));
        }
        if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(FieldError::InvalidGrid(format!("periods {l1}, {l2} must be positive")));
        }
        Ok(Self { n1, n2, n3, l1, l2 })
    }

    pub fn h1(&self) -> f64 {
        self.l1 / self.n1 as f64
    }
    pub fn h2(&self) -> f64 {
        self.l2 / self.n2 as f64
    }
    pub fn h3(&self) -> f64 {
        1.0 / (self.n3 - 1) as f64
    }
    pub fn plane_len(&self) -> usize {
        self.n1 * self.n2
    }
    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.n2 + j) * self.n1 + i
    }
    /// Inverse of `idx`.
    #[inline]
    pub fn ijk(&self, p: usize) -> (usize, usize, usize) {
        let i = p % self.n1;
        let j = (p / self.n1) % self.n2;
        let k = p / self.plane_len();
        (i, j, k)
    }
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h1()
    }
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.h2()
    }
    pub fn z(&self, k: usize) -> f64 {
        if k == self.n3 - 1 {
            1.0
        } else {
            k as f64 * self.h3()
        }
    }
    pub fn point(&self, p: usize) -> [f64; 3] {
        let (i, j, k) = self.ijk(p);
        [self.x(i), self.y(j), self.z(k)]
    }
    pub fn plane(&self) -> Grid2 {
        Grid2 { n1: self.n1, n2: self.n2, l1: self.l1, l2: self.l2 }
    }
    pub fn volume(&self) -> f64 {
        self.l1 * self.l2
    }
    /// Trapezoid weights in z (sum to 1).
    pub fn z_weights(&self) -> Vec<f64> {
        let h = self.h3();
        (0..self.n3)
            .map(|k| if k == 0 || k == self.n3 - 1 { 0.5 * h } else { h })
            .collect()
    }
    /// Same grid at twice the resolution in every direction.
    pub fn refined(&self) -> Self {
        Self { n1: 2 * self.n1, n2: 2 * self.n2, n3: 2 * self.n3 - 1, l1: self.l1, l2: self.l2 }
    }
}

/// Periodic plane grid used for wall traces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
}

impl Grid2 {
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn h1(&self) -> f64 {
        self.l1 / self.n1 as f64
    }
    pub fn h2(&self) -> f64 {
        self.l2 / self.n2 as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h1()
    }
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.h2()
    }
    pub fn area(&self) -> f64 {
        self.l1 * self.l2
    }
    pub fn xy(&self, p: usize) -> (f64, f64) {
        (self.x(p % self.n1), self.y(p / self.n1))
    }
}
