//! Analytic background flows: the potential part 𝒱 carrying the normal
//! boundary velocity and the full field 𝒰 with a prescribed tangential
//! trace on the inflow wall.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::fields::spacetime::time_stencil;
use crate::fields::spectral::{fft_planes, ifft_planes, modes};
use crate::fields::{ops, Grid3, PlaneField, TangentPlane, VectorField};
use crate::geometry::{ChannelDomain, Wall, WallCalculus};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackgroundKind {
    /// Uniform vertical flow at constant speed.
    #[default]
    TwConstant,
    /// Uniform vertical flow with speed a0 + a1 sin(ωt).
    TimeVarying,
    /// Time-varying speed plus a potential bump and a tangential inflow profile.
    General,
}

/// Tangential velocity of 𝒰 on the inflow wall.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TangentialSpec {
    #[default]
    Zero,
    /// s(t) (sin(2πy/L₂) + c1, sin(2πx/L₁) + c2) with s(t) = s0 + s1 sin(ωt).
    Shear { s0: f64, s1: f64, c1: f64, c2: f64 },
    /// h0 + t h1 + t²/2 h2 with planes taken from the initial data.
    Recipe,
}

/// How time derivatives of background traces are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeDerivative {
    #[default]
    Analytic,
    Stencil,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSpec {
    pub kind: BackgroundKind,
    /// Mean inflow speed through the top wall.
    pub inflow_speed: f64,
    /// Mean outflow speed through the bottom wall; must equal the inflow speed.
    pub outflow_speed: Option<f64>,
    pub oscillation: f64,
    pub frequency: f64,
    /// Amplitude of the cos(2πmx/L₁) normal-velocity bump.
    pub bump: f64,
    pub bump_mode: usize,
    pub tangential: TangentialSpec,
    pub time_derivative: TimeDerivative,
}

impl Default for BackgroundSpec {
    fn default() -> Self {
        Self {
            kind: BackgroundKind::TwConstant,
            inflow_speed: 1.0,
            outflow_speed: None,
            oscillation: 0.0,
            frequency: 1.0,
            bump: 0.0,
            bump_mode: 1,
            tangential: TangentialSpec::Zero,
            time_derivative: TimeDerivative::Analytic,
        }
    }
}

/// Quadratic-in-time tangential trace h0 + t h1 + t²/2 h2.
#[derive(Clone, Debug, PartialEq)]
pub struct RecipeTrace {
    pub h0: TangentPlane,
    pub h1: TangentPlane,
    pub h2: TangentPlane,
}

#[derive(Clone, Debug, PartialEq)]
enum Tangential {
    Zero,
    Shear { s0: f64, s1: f64, c1: f64, c2: f64 },
    Recipe(RecipeTrace),
}

/// Background flow sampled on a channel grid, with slice spacing `dt`.
#[derive(Clone, Debug)]
pub struct Background {
    pub grid: Grid3,
    pub dt: f64,
    pub nt: usize,
    pub a0: f64,
    pub a1: f64,
    pub omega: f64,
    pub bump: f64,
    pub time_derivative: TimeDerivative,
    bump_shape: VectorField,
    tangential: Tangential,
    wall: WallCalculus,
}

impl Background {
    pub fn new(grid: Grid3, nt: usize, dt: f64, spec: &BackgroundSpec) -> Result<Self, ConfigError> {
        if let Some(out) = spec.outflow_speed {
            let d = out - spec.inflow_speed;
            if d.abs() > 1e-14 * spec.inflow_speed.abs().max(1.0) {
                return Err(ConfigError::NetFlux(d * grid.volume()));
            }
        }
        let (a1, bump, tangential) = match spec.kind {
            BackgroundKind::TwConstant => (0.0, 0.0, TangentialSpec::Zero),
            BackgroundKind::TimeVarying => (spec.oscillation, 0.0, TangentialSpec::Zero),
            BackgroundKind::General => (spec.oscillation, spec.bump, spec.tangential.clone()),
        };
        if spec.inflow_speed - a1.abs() - bump.abs() <= 0.0 {
            return Err(ConfigError::NormalSign(Wall::Top.name()));
        }
        if bump != 0.0 && (spec.bump_mode == 0 || 2 * spec.bump_mode >= grid.n1) {
            return Err(ConfigError::Invalid(format!("bump_mode {} not resolved by n1={}", spec.bump_mode, grid.n1)));
        }
        let tangential = match tangential {
            TangentialSpec::Zero => Tangential::Zero,
            TangentialSpec::Shear { s0, s1, c1, c2 } => Tangential::Shear { s0, s1, c1, c2 },
            TangentialSpec::Recipe => {
                let z = TangentPlane::zeros(grid.plane());
                Tangential::Recipe(RecipeTrace { h0: z.clone(), h1: z.clone(), h2: z })
            }
        };
        let bg = Self {
            grid,
            dt,
            nt,
            a0: spec.inflow_speed,
            a1,
            omega: spec.frequency,
            bump,
            time_derivative: spec.time_derivative,
            bump_shape: bump_shape(grid, spec.bump_mode),
            tangential,
            wall: WallCalculus::new(grid.plane()),
        };
        let domain = ChannelDomain { l1: grid.l1, l2: grid.l2, impermeable: false };
        domain.validate_normal_flow(&bg.normal(Wall::Top, 0.0), &bg.normal(Wall::Bottom, 0.0))?;
        Ok(bg)
    }

    /// Fluid at rest on both walls: the background of the impermeable mode.
    pub fn at_rest(grid: Grid3, nt: usize, dt: f64) -> Self {
        Self {
            grid,
            dt,
            nt,
            a0: 0.0,
            a1: 0.0,
            omega: 1.0,
            bump: 0.0,
            time_derivative: TimeDerivative::Analytic,
            bump_shape: VectorField::zeros(grid),
            tangential: Tangential::Zero,
            wall: WallCalculus::new(grid.plane()),
        }
    }

    /// Uniform flow (0, 0, −speed).
    pub fn tw_constant(grid: Grid3, nt: usize, dt: f64, speed: f64) -> Result<Self, ConfigError> {
        Self::new(grid, nt, dt, &BackgroundSpec { inflow_speed: speed, ..Default::default() })
    }

    pub fn set_recipe(&mut self, r: RecipeTrace) {
        self.tangential = Tangential::Recipe(r);
    }

    pub fn recipe(&self) -> Option<&RecipeTrace> {
        match &self.tangential {
            Tangential::Recipe(r) => Some(r),
            _ => None,
        }
    }

    pub fn wall_calculus(&self) -> &WallCalculus {
        &self.wall
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.a0 + self.a1 * (self.omega * t).sin()
    }
    pub fn speed_dt(&self, t: f64) -> f64 {
        self.a1 * self.omega * (self.omega * t).cos()
    }
    pub fn speed_dtt(&self, t: f64) -> f64 {
        -self.a1 * self.omega * self.omega * (self.omega * t).sin()
    }

    /// Smallest inflow speed |U^n| on the top wall over [0, T].
    pub fn min_inflow_speed(&self) -> f64 {
        (0..=self.nt)
            .map(|m| self.normal(Wall::Top, m as f64 * self.dt).max().abs())
            .fold(f64::INFINITY, f64::min)
    }
    pub fn max_inflow_speed(&self) -> f64 {
        (0..=self.nt)
            .map(|m| self.normal(Wall::Top, m as f64 * self.dt).min().abs())
            .fold(0.0, f64::max)
    }

    /// Potential part 𝒱(t).
    pub fn potential(&self, t: f64) -> VectorField {
        let mut v = self.bump_shape.scale(-self.bump);
        for z in v.c[2].iter_mut() {
            *z -= self.speed(t);
        }
        v
    }

    pub fn potential_dt(&self, t: f64) -> VectorField {
        VectorField::constant(self.grid, [0.0, 0.0, -self.speed_dt(t)])
    }

    /// U^n on a wall with the outward normal of that wall.
    pub fn normal(&self, wall: Wall, t: f64) -> PlaneField {
        let k = wall.k(&self.grid);
        let np = self.grid.plane_len();
        let s = wall.normal_sign();
        let a = self.speed(t);
        PlaneField {
            grid: self.grid.plane(),
            data: self.bump_shape.c[2][k * np..(k + 1) * np].iter().map(|b| s * (-a - self.bump * b)).collect(),
        }
    }

    fn normal_dt_analytic(&self, wall: Wall, t: f64, order: u32) -> PlaneField {
        let d = if order == 1 { self.speed_dt(t) } else { self.speed_dtt(t) };
        PlaneField::constant(self.grid.plane(), -wall.normal_sign() * d)
    }

    /// ∂tU^n at slice m.
    pub fn normal_dt(&self, wall: Wall, m: usize) -> PlaneField {
        match self.time_derivative {
            TimeDerivative::Analytic => self.normal_dt_analytic(wall, m as f64 * self.dt, 1),
            TimeDerivative::Stencil => self.stencil(m, |t| self.normal(wall, t).data),
        }
    }

    /// ∂tU^n at an arbitrary time (analytic).
    pub fn normal_dt_at(&self, wall: Wall, t: f64) -> PlaneField {
        self.normal_dt_analytic(wall, t, 1)
    }
    pub fn normal_dtt_at(&self, wall: Wall, t: f64) -> PlaneField {
        self.normal_dt_analytic(wall, t, 2)
    }

    fn stencil(&self, m: usize, f: impl Fn(f64) -> Vec<f64>) -> PlaneField {
        let mut out = vec![0.0; self.grid.plane_len()];
        for (s, w) in time_stencil(self.nt, m) {
            for (o, v) in out.iter_mut().zip(f(s as f64 * self.dt)) {
                *o += w * v / self.dt;
            }
        }
        PlaneField { grid: self.grid.plane(), data: out }
    }

    /// Prescribed tangential trace 𝒰^τ on the inflow wall.
    pub fn inflow_tangential(&self, t: f64) -> TangentPlane {
        self.tangential_derivative(t, 0)
    }

    /// Time derivative of order `order` of 𝒰^τ at time t (analytic).
    pub fn tangential_derivative(&self, t: f64, order: u32) -> TangentPlane {
        let g = self.grid.plane();
        match &self.tangential {
            Tangential::Zero => TangentPlane::zeros(g),
            Tangential::Shear { s0, s1, c1, c2 } => {
                let w = self.omega;
                let s = match order {
                    0 => s0 + s1 * (w * t).sin(),
                    1 => s1 * w * (w * t).cos(),
                    _ => -s1 * w * w * (w * t).sin(),
                };
                let (l1, l2) = (g.l1, g.l2);
                TangentPlane::from_fn(g, |x, y| {
                    [s * ((2.0 * PI * y / l2).sin() + c1), s * ((2.0 * PI * x / l1).sin() + c2)]
                })
            }
            Tangential::Recipe(r) => match order {
                0 => r.h0.combine(1.0, &r.h1, t).combine(1.0, &r.h2, 0.5 * t * t),
                1 => r.h1.combine(1.0, &r.h2, t),
                _ => r.h2.clone(),
            },
        }
    }

    /// ∂t𝒰^τ at slice m.
    pub fn inflow_tangential_dt(&self, m: usize) -> TangentPlane {
        match self.time_derivative {
            TimeDerivative::Analytic => self.tangential_derivative(m as f64 * self.dt, 1),
            TimeDerivative::Stencil => {
                let g = self.grid.plane();
                let mut out = TangentPlane::zeros(g);
                for (s, w) in time_stencil(self.nt, m) {
                    let v = self.inflow_tangential(s as f64 * self.dt);
                    out = out.combine(1.0, &v, w / self.dt);
                }
                out
            }
        }
    }

    /// Full background 𝒰(t) = 𝒱(t) plus a divergence-free lift of the tangential mismatch on the top wall.
    pub fn full(&self, t: f64) -> VectorField {
        let v = self.potential(t);
        let target = self.inflow_tangential(t);
        let vt = v.tangential(Wall::Top);
        let mismatch = target.combine(1.0, &vt, -1.0);
        &v + &self.lift(&mismatch)
    }

    /// Field with tangential trace `h` on the top wall, zero on the bottom wall, zero normal trace.
    pub fn lift(&self, h: &TangentPlane) -> VectorField {
        let g = self.grid;
        let np = g.plane_len();
        let div = self.wall.div(h);
        let mut out = VectorField::zeros(g);
        for k in 0..g.n3 {
            let z = g.z(k);
            let zeta = 3.0 * z * z - 2.0 * z;
            let cubic = z * z * z - z * z;
            for p in 0..np {
                out.c[0][k * np + p] = zeta * h.x[p];
                out.c[1][k * np + p] = zeta * h.y[p];
                out.c[2][k * np + p] = -div.data[p] * cubic;
            }
        }
        out
    }
}

/// cos(kx) cosh(k(z−½))/cosh(k/2) in z with horizontal parts making the discrete divergence zero.
fn bump_shape(grid: Grid3, mode: usize) -> VectorField {
    let k = 2.0 * PI * mode as f64 / grid.l1;
    let mut s = VectorField::zeros(grid);
    if mode == 0 || 2 * mode >= grid.n1 {
        return s;
    }
    s.c[2] = (0..grid.len())
        .map(|p| {
            let x = grid.point(p);
            (k * x[0]).cos() * (k * (x[2] - 0.5)).cosh() / (0.5 * k).cosh()
        })
        .collect();
    let dz = ops::dz_raw(&grid, &s.c[2]);
    let d = fft_planes(&grid, &dz);
    let mt = modes(&grid.plane());
    let np = grid.plane_len();
    let mut hx = vec![Complex64::new(0.0, 0.0); d.len()];
    let mut hy = hx.clone();
    for (q, dq) in d.iter().enumerate() {
        let m = q % np;
        let kk = mt.kx[m] * mt.kx[m] + mt.ky[m] * mt.ky[m];
        if kk > 0.0 {
            // D = −∂z s_z and ŝ_h = −i k D / |k|²
            let dd = -dq;
            hx[q] = Complex64::new(0.0, -mt.kx[m] / kk) * dd;
            hy[q] = Complex64::new(0.0, -mt.ky[m] / kk) * dd;
        }
    }
    s.c[0] = ifft_planes(&grid, hx);
    s.c[1] = ifft_planes(&grid, hy);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid3 {
        Grid3::new(16, 8, 17, 1.0, 1.0).unwrap()
    }

    #[test]
    fn tw_constant_is_uniform_downflow() {
        let b = Background::tw_constant(grid(), 4, 0.1, 1.0).unwrap();
        let u = b.full(0.3);
        assert_eq!(u.at(17), [0.0, 0.0, -1.0]);
        assert_eq!(b.normal(Wall::Top, 0.0).max(), -1.0);
        assert_eq!(b.normal(Wall::Bottom, 0.0).min(), 1.0);
        assert_eq!(b.inflow_tangential(0.2).max_norm(), 0.0);
    }

    #[test]
    fn time_varying_normal_derivative() {
        let spec = BackgroundSpec { kind: BackgroundKind::TimeVarying, oscillation: 0.1, ..Default::default() };
        let b = Background::new(grid(), 4, 0.25, &spec).unwrap();
        for m in 0..=4 {
            let t = m as f64 * 0.25;
            let d = b.normal_dt(Wall::Top, m);
            assert!((d.max() - (-0.1 * t.cos())).abs() < 1e-15);
            let db = b.normal_dt(Wall::Bottom, m);
            assert!((db.min() - 0.1 * t.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn net_flux_and_sign_violations_rejected() {
        let spec = BackgroundSpec { outflow_speed: Some(1.5), ..Default::default() };
        assert!(matches!(Background::new(grid(), 2, 0.1, &spec), Err(ConfigError::NetFlux(_))));
        let spec = BackgroundSpec { kind: BackgroundKind::General, bump: 2.0, ..Default::default() };
        assert!(matches!(Background::new(grid(), 2, 0.1, &spec), Err(ConfigError::NormalSign(_))));
    }

    #[test]
    fn general_background_invariants() {
        let spec = BackgroundSpec {
            kind: BackgroundKind::General,
            oscillation: 0.1,
            bump: 0.3,
            tangential: TangentialSpec::Shear { s0: 0.2, s1: 0.05, c1: 0.1, c2: -0.1 },
            ..Default::default()
        };
        let g = grid();
        let b = Background::new(g, 4, 0.1, &spec).unwrap();
        let v = b.potential(0.2);
        assert!(ops::divergence(&v).max_abs() < 1e-12);
        // curl-free up to the z differences: second order inside, first order on the wall layers
        let fine = Background::new(g.refined(), 4, 0.1, &spec).unwrap();
        let interior = |v: &VectorField| {
            let c = ops::curl3(v);
            let gg = v.grid;
            (0..gg.len())
                .filter(|&p| {
                    let z = gg.point(p)[2];
                    z > 0.2 && z < 0.8
                })
                .map(|p| c.c[1][p].abs())
                .fold(0.0, f64::max)
        };
        let (i1, i2) = (interior(&v), interior(&fine.potential(0.2)));
        assert!(i1 / i2 > 3.0, "{i1} {i2}");
        let (c1, c2) = (ops::curl3(&v).max_abs(), ops::curl3(&fine.potential(0.2)).max_abs());
        assert!(c1 / c2 > 1.8, "{c1} {c2}");
        let u = b.full(0.2);
        let ut = u.tangential(Wall::Top);
        let target = b.inflow_tangential(0.2);
        assert!(ut.combine(1.0, &target, -1.0).max_norm() < 1e-14);
        assert!(u.tangential(Wall::Bottom).combine(1.0, &v.tangential(Wall::Bottom), -1.0).max_norm() < 1e-14);
        for wall in [Wall::Top, Wall::Bottom] {
            let d = u.normal(wall).zip_with(&b.normal(wall, 0.2), |a, b| a - b);
            assert!(d.max_abs() < 1e-14);
        }
    }
}
