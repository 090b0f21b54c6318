use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use euler_inflow::error::{ConfigError, IoError, SolverError};
use euler_inflow::io;
use euler_inflow::solver::config::CONFIG_VERSION;
use euler_inflow::solver::{fixed_point_solve, mms, Mode, Problem, SolverConfig};

create_exception!(euler_inflow, InvalidConfig, PyValueError);
create_exception!(euler_inflow, SolveFailed, PyRuntimeError);

fn config_err(e: ConfigError) -> PyErr {
    InvalidConfig::new_err(e.to_string())
}

fn solver_err(e: SolverError) -> PyErr {
    match e {
        SolverError::Config(c) => config_err(c),
        other => SolveFailed::new_err(other.to_string()),
    }
}

fn io_err(e: IoError) -> PyErr {
    pyo3::exceptions::PyOSError::new_err(e.to_string())
}

/// Serialize through JSON into plain Python objects.
fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::InflowOutflow => "inflow-outflow",
        Mode::VorticityBc => "vorticity-bc",
        Mode::Impermeable => "impermeable",
    }
}

/// A validated solver configuration.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: SolverConfig,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self { inner: SolverConfig::from_toml(text).map_err(config_err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: SolverConfig::load(&path).map_err(config_err)? })
    }

    /// Steady tw-constant channel flow on an n²×(n+1) grid.
    #[staticmethod]
    #[pyo3(signature = (n, nt=4, t_final=0.1))]
    fn steady(n: usize, nt: usize, t_final: f64) -> Self {
        Self { inner: SolverConfig::steady(n, nt, t_final) }
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        mode_name(self.inner.mode)
    }

    #[getter]
    fn grid(&self) -> (usize, usize, usize) {
        (self.inner.grid.n1, self.inner.grid.n2, self.inner.grid.n3)
    }

    #[getter]
    fn nt(&self) -> usize {
        self.inner.time.nt
    }

    #[getter]
    fn t_final(&self) -> f64 {
        self.inner.time.t_final
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        let g = &self.inner.grid;
        format!("Config(mode={}, grid={}x{}x{}, nt={}, t_final={})", self.mode(), g.n1, g.n2, g.n3, self.inner.time.nt, self.inner.time.t_final)
    }
}

/// Result of a fixed-point solve.
#[pyclass(name = "Solution", unsendable)]
struct PySolution {
    sol: euler_inflow::solver::Solution,
    formats: Vec<String>,
    every: usize,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn converged(&self) -> bool {
        self.sol.report.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.sol.report.iterations.len()
    }

    #[getter]
    fn momentum_residual(&self) -> f64 {
        self.sol.report.momentum_residual
    }

    /// (slices, components, n3, n2, n1) of `velocity`.
    #[getter]
    fn shape(&self) -> (usize, usize, usize, usize, usize) {
        let g = self.sol.u.grid;
        (self.sol.u.slices.len(), 3, g.n3, g.n2, g.n1)
    }

    /// Full report as nested dicts and lists.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.sol.report)
    }

    /// Velocity of slice m, components stacked, node index (k·n2 + j)·n1 + i.
    fn velocity(&self, m: usize) -> PyResult<Vec<f64>> {
        let s = self.sol.u.slices.get(m).ok_or_else(|| PyValueError::new_err(format!("slice {m} out of range")))?;
        Ok(s.c.concat())
    }

    fn pressure(&self, m: usize) -> PyResult<Vec<f64>> {
        let p = self.sol.p.get(m).ok_or_else(|| PyValueError::new_err(format!("slice {m} out of range")))?;
        Ok(p.q.data.clone())
    }

    /// Write fields, CSV diagnostics and plots. Formats default to the config's.
    #[pyo3(signature = (dir, formats=None))]
    fn write(&self, dir: PathBuf, formats: Option<Vec<String>>) -> PyResult<()> {
        io::write_solution(&dir, &self.sol, formats.as_deref().unwrap_or(&self.formats), self.every).map_err(io_err)
    }
}

#[pyfunction]
fn solve(py: Python<'_>, config: PyConfig) -> PyResult<PySolution> {
    let cfg = config.inner;
    let sol = py
        .detach(|| {
            let p = Problem::new(&cfg)?;
            fixed_point_solve(&p, None)
        })
        .map_err(solver_err)?;
    Ok(PySolution { sol, formats: cfg.output.fields.clone(), every: cfg.output.every })
}

/// Compatibility defects of an inflow configuration, or None for the other modes.
#[pyfunction]
fn check_compat<'py>(py: Python<'py>, config: PyConfig) -> PyResult<Option<Bound<'py, PyDict>>> {
    let mut cfg = config.inner;
    if cfg.mode != Mode::InflowOutflow {
        return Ok(None);
    }
    let tol = cfg.tolerances.compat;
    cfg.tolerances.compat = f64::INFINITY;
    let p = Problem::new(&cfg).map_err(config_err)?;
    let rep = p.compat.expect("inflow mode reports compatibility");
    let (v1, w1) = rep.cond1_verdicts(tol);
    let d = PyDict::new(py);
    d.set_item("report", to_py(py, &rep)?)?;
    d.set_item("tol", tol)?;
    d.set_item("cond0", rep.cond0_passes(tol))?;
    d.set_item("cond1_velocity", v1)?;
    d.set_item("cond1_vorticity", w1)?;
    d.set_item("ratio", rep.cond1_ratio())?;
    Ok(Some(d))
}

/// Convergence table: "pressure-z", "pressure-plane" or "biot-savart".
#[pyfunction]
#[pyo3(signature = (case="pressure-z"))]
fn run_mms<'py>(py: Python<'py>, case: &str) -> PyResult<Bound<'py, PyAny>> {
    let rows = match case {
        "pressure-z" => mms::pressure_z_study(8, &[9, 17, 33]),
        "pressure-plane" => mms::pressure_plane_study(&[4, 8, 16], 9),
        "biot-savart" => mms::biot_savart_study(&[8, 16]),
        other => return Err(PyValueError::new_err(format!("unknown case `{other}`"))),
    };
    to_py(py, &rows)
}

#[pymodule(name = "euler_inflow")]
fn euler_inflow_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CONFIG_VERSION", CONFIG_VERSION)?;
    m.add("InvalidConfig", m.py().get_type::<InvalidConfig>())?;
    m.add("SolveFailed", m.py().get_type::<SolveFailed>())?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check_compat, m)?)?;
    m.add_function(wrap_pyfunction!(run_mms, m)?)?;
    Ok(())
}
