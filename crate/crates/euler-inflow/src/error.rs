use thiserror::Error;

/// Errors raised by field construction and discrete operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("time {t} outside [0, {t_final}]")]
    TimeOutOfRange { t: f64, t_final: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

/// Errors from the surface calculus.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("patch grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("vector is not tangent: normal component {0:e}")]
    NotTangent(f64),
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
}

/// Errors from characteristic tracing and transport.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("characteristic through {x:?} at t={t} left the domain through the outflow wall (z={z:e})")]
    ExitThroughOutflow { t: f64, x: [f64; 3], z: f64 },
    #[error("inflow data missing at time {0}")]
    MissingInflow(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Configuration and validation failures; mapped to exit code 2 by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("net boundary flux {0:e} is not zero")]
    NetFlux(f64),
    #[error("normal velocity sign violated on {0}")]
    NormalSign(&'static str),
    #[error("inflow speed {found:e} below floor {floor:e}")]
    InflowFloor { found: f64, floor: f64 },
    #[error("prescribed boundary vorticity rejected: {0}")]
    ConstraintViolated(String),
    #[error("initial data incompatible with the inflow data: {0}")]
    Incompatible(String),
    #[error("unsupported config version {0}")]
    Version(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Failures of the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("vorticity left the range of the curl at slice {slice}: div {div:e}, fluxes {flux_top:e}/{flux_bottom:e}")]
    RangeOfCurl { slice: usize, div: f64, flux_top: f64, flux_bottom: f64 },
    #[error("iterate norm {norm:e} exceeded cap {cap:e} at iteration {iteration}")]
    InvariantBall { iteration: usize, norm: f64, cap: f64 },
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(String),
}
