//! Versioned TOML configuration and the data it describes.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::fields::{ops, Grid3, VectorField};
use crate::recovery::{Background, BackgroundSpec};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    InflowOutflow,
    VorticityBc,
    Impermeable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    #[serde(default = "one")]
    pub l1: f64,
    #[serde(default = "one")]
    pub l2: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_final: f64,
    pub nt: usize,
    /// RK4 substeps per slice interval for the characteristics.
    #[serde(default = "default_substeps")]
    pub ode_substeps: usize,
}

fn default_substeps() -> usize {
    8
}

/// f = curl Φ with Φ = (0, 0, a s(t) sin(2πm₁x/L₁) cos(2πm₂y/L₂)), s(t) = 1 + b sin(νt).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingSpec {
    pub amplitude: f64,
    pub mode: [usize; 2],
    pub oscillation: f64,
    pub frequency: f64,
}

impl Default for ForcingSpec {
    fn default() -> Self {
        Self { amplitude: 0.0, mode: [1, 1], oscillation: 0.0, frequency: 1.0 }
    }
}

impl ForcingSpec {
    fn potential(&self, grid: Grid3, scale: f64) -> VectorField {
        let (k1, k2) = (2.0 * PI * self.mode[0] as f64 / grid.l1, 2.0 * PI * self.mode[1] as f64 / grid.l2);
        let a = self.amplitude * scale;
        VectorField::from_fn(grid, |x| [0.0, 0.0, a * (k1 * x[0]).sin() * (k2 * x[1]).cos()])
    }
    pub fn at(&self, grid: Grid3, t: f64) -> VectorField {
        ops::curl3(&self.potential(grid, 1.0 + self.oscillation * (self.frequency * t).sin()))
    }
    pub fn dt_at(&self, grid: Grid3, t: f64) -> VectorField {
        ops::curl3(&self.potential(grid, self.oscillation * self.frequency * (self.frequency * t).cos()))
    }
}

/// u₀ = background + a swirl curl ψ, ψ = a sin²(πz) (cos(2πm₂y/L₂), sin(2πm₁x/L₁), 0).
/// With `recipe` the inflow tangential trace is built from u₀ so that both compatibility conditions hold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSpec {
    pub perturbation: f64,
    pub mode: [usize; 2],
    pub recipe: bool,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self { perturbation: 0.0, mode: [1, 1], recipe: false }
    }
}

pub fn swirl(grid: Grid3, a: f64, mode: [usize; 2]) -> VectorField {
    let (k1, k2) = (2.0 * PI * mode[0] as f64 / grid.l1, 2.0 * PI * mode[1] as f64 / grid.l2);
    let psi = VectorField::from_fn(grid, |x| {
        let s = (PI * x[2]).sin().powi(2);
        [a * s * (k2 * x[1]).cos(), a * s * (k1 * x[0]).sin(), 0.0]
    });
    ops::curl3(&psi)
}

/// Prescribed boundary vorticity for the vorticity-BC mode: H = (h₁, h₂, hₙ) constant,
/// and the harmonic component held at `harmonic`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VorticityBcSpec {
    pub tangential: [f64; 2],
    pub normal: f64,
    pub harmonic: Option<[f64; 2]>,
}

impl Default for VorticityBcSpec {
    fn default() -> Self {
        Self { tangential: [0.0, 0.0], normal: 0.0, harmonic: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Stop when the discrete C^β norm of u_{k+1} − u_k falls below this.
    pub fixed_point: f64,
    pub beta: f64,
    /// Hölder exponent of the diagnostics; β must lie in (0, α).
    pub alpha: f64,
    pub max_iterations: usize,
    /// Cap M on the X-norm of the iterates.
    pub x_norm_cap: f64,
    /// Abort threshold for div ω and the wall fluxes of ω.
    pub range_of_curl: f64,
    pub compat: f64,
    pub inflow_floor: f64,
    /// Largest admissible time horizon.
    pub t_max: f64,
    /// Flow-map bound samples per iterate.
    pub eta_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fixed_point: 1e-8,
            beta: 0.5,
            alpha: 0.75,
            max_iterations: 30,
            x_norm_cap: 1e4,
            range_of_curl: 1.0,
            compat: 1e-6,
            inflow_floor: 1e-3,
            t_max: 1.0,
            eta_samples: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Any of "vtk-ascii", "vtk-binary", "raw".
    pub fields: Vec<String>,
    pub every: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), fields: vec!["vtk-binary".into()], every: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub version: u32,
    #[serde(default)]
    pub mode: Mode,
    pub grid: GridSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub background: BackgroundSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub vorticity_bc: VorticityBcSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

impl SolverConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: toml::Value = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        match raw.get("version").and_then(|v| v.as_integer()) {
            Some(v) if v == CONFIG_VERSION as i64 => {}
            Some(v) => return Err(ConfigError::Version(v.max(0) as u32)),
            None => return Err(ConfigError::Parse("missing `version`".into())),
        }
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A steady uniform downflow on an n²×(n+1) grid.
    pub fn steady(n: usize, nt: usize, t_final: f64) -> Self {
        Self {
            version: CONFIG_VERSION,
            mode: Mode::InflowOutflow,
            grid: GridSpec { n1: n, n2: n, n3: n + 1, l1: 1.0, l2: 1.0 },
            time: TimeSpec { t_final, nt, ode_substeps: default_substeps() },
            background: BackgroundSpec::default(),
            forcing: ForcingSpec::default(),
            initial: InitialSpec::default(),
            vorticity_bc: VorticityBcSpec::default(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let tol = &self.tolerances;
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Version(self.version));
        }
        if !(tol.beta > 0.0 && tol.beta < tol.alpha && tol.alpha <= 1.0) {
            return Err(ConfigError::Invalid(format!("need 0 < beta < alpha <= 1, got beta={} alpha={}", tol.beta, tol.alpha)));
        }
        if !(self.time.t_final > 0.0 && self.time.t_final <= tol.t_max) {
            return Err(ConfigError::Invalid(format!("t_final {} outside (0, {}]", self.time.t_final, tol.t_max)));
        }
        if self.time.nt == 0 || self.time.ode_substeps == 0 {
            return Err(ConfigError::Invalid("nt and ode_substeps must be positive".into()));
        }
        if tol.max_iterations == 0 {
            return Err(ConfigError::Invalid("max_iterations must be positive".into()));
        }
        self.grid()?;
        if self.mode == Mode::VorticityBc && self.initial.recipe {
            return Err(ConfigError::Invalid("the recipe builds inflow velocity data; it does not apply to the vorticity-bc mode".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid3, ConfigError> {
        Ok(Grid3::new(self.grid.n1, self.grid.n2, self.grid.n3, self.grid.l1, self.grid.l2)?)
    }

    pub fn dt(&self) -> f64 {
        self.time.t_final / self.time.nt as f64
    }

    pub fn background(&self) -> Result<Background, ConfigError> {
        let g = self.grid()?;
        match self.mode {
            Mode::Impermeable => Ok(Background::at_rest(g, self.time.nt, self.dt())),
            _ => Background::new(g, self.time.nt, self.dt(), &self.background),
        }
    }

    pub fn forcing_slices(&self) -> Result<Vec<VectorField>, ConfigError> {
        let g = self.grid()?;
        Ok((0..=self.time.nt).map(|m| self.forcing.at(g, m as f64 * self.dt())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
version = 1
[grid]
n1 = 8
n2 = 8
n3 = 9
[time]
t_final = 0.1
nt = 4
"#;

    #[test]
    fn minimal_config_round_trips() {
        let cfg = SolverConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.mode, Mode::InflowOutflow);
        assert_eq!(cfg.time.ode_substeps, 8);
        let again = SolverConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(SolverConfig::from_toml(&MINIMAL.replace("version = 1", "version = 2")), Err(ConfigError::Version(2))));
        assert!(matches!(SolverConfig::from_toml(&format!("{MINIMAL}\n[extra]\na = 1\n")), Err(ConfigError::Parse(_))));
        let beta = format!("{MINIMAL}\n[tolerances]\nbeta = 0.9\nalpha = 0.5\n");
        assert!(matches!(SolverConfig::from_toml(&beta), Err(ConfigError::Invalid(_))));
        let long = MINIMAL.replace("t_final = 0.1", "t_final = 5.0");
        assert!(matches!(SolverConfig::from_toml(&long), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn forcing_is_tangent_and_solenoidal() {
        let cfg = SolverConfig::from_toml(&format!("{MINIMAL}\n[forcing]\namplitude = 0.5\noscillation = 0.3\n")).unwrap();
        let g = cfg.grid().unwrap();
        let f = cfg.forcing.at(g, 0.05);
        assert!(ops::divergence(&f).max_abs() < 1e-12);
        assert_eq!(f.c[2].iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
        let s = swirl(g, 0.2, [1, 1]);
        assert!(ops::divergence(&s).max_abs() < 1e-12);
        assert!(s.normal(crate::geometry::Wall::Top).max_abs() < 1e-14);
    }
}
