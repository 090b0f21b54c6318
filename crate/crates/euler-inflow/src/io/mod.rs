//! Output: VTK fields, raw arrays, CSV diagnostics, SVG plots.

pub mod raw;
pub mod svg;
pub mod vtk;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use crate::boundary_data::InflowVorticity;
use crate::error::IoError;
use crate::fields::ops;
use crate::solver::{IterationRecord, Solution};
use vtk::{PointData, VtkFormat};

fn csv_err(e: csv::Error) -> IoError {
    IoError::Format(e.to_string())
}

/// Columns of named f64 series, one row per index.
pub fn write_columns(path: &Path, names: &[&str], columns: &[Vec<f64>]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(names).map_err(csv_err)?;
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..rows {
        let rec: Vec<String> = columns.iter().map(|c| c.get(r).map_or(String::new(), |v| format!("{v:.17e}"))).collect();
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub const ITERATION_COLUMNS: [&str; 14] = [
    "iteration",
    "diff_holder",
    "diff_x",
    "x_norm",
    "sup_diff",
    "constraint",
    "divergence",
    "normal_trace",
    "range_worst",
    "eta_grad_ratio",
    "eta_det_defect",
    "u_minus",
    "u_plus",
    "near_s",
];

pub fn write_iterations(path: &Path, rows: &[IterationRecord]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(ITERATION_COLUMNS).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.iteration.to_string()];
        for v in [r.diff_holder, r.diff_x, r.x_norm, r.sup_diff, r.constraint, r.divergence, r.normal_trace, r.range_worst, r.eta_grad_ratio, r.eta_det_defect] {
            rec.push(format!("{v:.17e}"));
        }
        rec.extend(r.regions.iter().map(|c| c.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// H over the Γ₊ grid: one row per slice and node.
pub fn write_inflow_vorticity(path: &Path, h: &[InflowVorticity], dt: f64) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["slice", "t", "x", "y", "h_x", "h_y", "h_n"]).map_err(csv_err)?;
    for (m, s) in h.iter().enumerate() {
        let g = s.normal.grid;
        for p in 0..g.len() {
            let (x, y) = g.xy(p);
            let rec = [
                m.to_string(),
                format!("{:.17e}", m as f64 * dt),
                format!("{x:.17e}"),
                format!("{y:.17e}"),
                format!("{:.17e}", s.tangential.x[p]),
                format!("{:.17e}", s.tangential.y[p]),
                format!("{:.17e}", s.normal.data[p]),
            ];
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-slice norms of the solution and its residuals.
pub fn write_norm_series(path: &Path, sol: &Solution) -> Result<(), IoError> {
    let u = &sol.u;
    let t: Vec<f64> = (0..=u.nt()).map(|m| u.t(m)).collect();
    let speed: Vec<f64> = u.slices.iter().map(|s| s.max_norm()).collect();
    let vort: Vec<f64> = u.slices.iter().map(|s| ops::curl3(s).max_norm()).collect();
    let div: Vec<f64> = u.slices.iter().map(|s| ops::divergence(s).max_abs()).collect();
    let mut names = vec!["t", "max_speed", "max_vorticity", "max_divergence", "momentum_residual"];
    let mut cols = vec![t, speed, vort, div, sol.report.momentum_per_slice.clone()];
    if !sol.report.z_norms.is_empty() {
        names.push("z_norm");
        cols.push(sol.report.z_norms.clone());
    }
    write_columns(path, &names, &cols)
}

pub fn format_from_name(name: &str) -> Result<Option<VtkFormat>, IoError> {
    match name {
        "vtk-ascii" => Ok(Some(VtkFormat::Ascii)),
        "vtk-binary" => Ok(Some(VtkFormat::Binary)),
        "raw" => Ok(None),
        other => Err(IoError::Format(format!("unknown output format `{other}`"))),
    }
}

/// Fields, diagnostics and plots of a solve into `dir`.
pub fn write_solution(dir: &Path, sol: &Solution, formats: &[String], every: usize) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    let u = &sol.u;
    let g = u.grid;
    for name in formats {
        match format_from_name(name)? {
            Some(fmt) => {
                for m in (0..=u.nt()).step_by(every.max(1)) {
                    let omega = ops::curl3(&u.slices[m]);
                    let suffix = if fmt == VtkFormat::Ascii { "ascii" } else { "bin" };
                    let f = File::create(dir.join(format!("fields_{m:04}.{suffix}.vtk")))?;
                    vtk::write_structured(
                        &mut BufWriter::new(f),
                        &format!("slice {m} t={}", u.t(m)),
                        &g,
                        fmt,
                        &[PointData::Vector("velocity", &u.slices[m]), PointData::Vector("vorticity", &omega), PointData::Scalar("pressure", &sol.p[m].q)],
                    )?;
                }
            }
            None => {
                raw::write_series(&dir.join("velocity.f64"), "velocity", &g, u.dt, &u.slices)?;
                raw::write_series(&dir.join("vorticity.f64"), "transported vorticity", &g, u.dt, &sol.last.omega.slices)?;
            }
        }
    }
    write_iterations(&dir.join("iterations.csv"), &sol.report.iterations)?;
    write_norm_series(&dir.join("norms.csv"), sol)?;
    if let Some(h) = &sol.last.h {
        write_inflow_vorticity(&dir.join("inflow_vorticity.csv"), h, u.dt)?;
    }
    let json = serde_json::to_string_pretty(&sol.report).map_err(|e| IoError::Format(e.to_string()))?;
    fs::write(dir.join("report.json"), json)?;
    write_plots(dir, sol)?;
    Ok(())
}

pub fn write_plots(dir: &Path, sol: &Solution) -> Result<(), IoError> {
    let it = &sol.report.iterations;
    let conv = svg::line_plot(
        "Picard convergence",
        "iteration",
        "norm of u_{k+1} - u_k",
        &[
            svg::Series { label: "C^beta".into(), points: it.iter().map(|r| (r.iteration as f64, r.diff_holder)).collect() },
            svg::Series { label: "sup".into(), points: it.iter().map(|r| (r.iteration as f64, r.sup_diff)).collect() },
        ],
        true,
    );
    fs::write(dir.join("convergence.svg"), conv)?;
    let u = &sol.u;
    let res = svg::line_plot(
        "Momentum residual",
        "t",
        "sup residual",
        &[svg::Series { label: "residual".into(), points: (0..=u.nt()).map(|m| (u.t(m), sol.report.momentum_per_slice[m])).collect() }],
        true,
    );
    fs::write(dir.join("residual.svg"), res)?;
    Ok(())
}
