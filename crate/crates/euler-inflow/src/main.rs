use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;
use thiserror::Error;

use euler_inflow::error::{ConfigError, IoError, SolverError};
use euler_inflow::flow_map::{separating_surface, VelocityHistory};
use euler_inflow::io::{self, raw, svg, vtk};
use euler_inflow::solver::mms::{self, MmsRow};
use euler_inflow::solver::{self, apply_a, fixed_point_solve, Mode, Problem, SolverConfig};

#[derive(Parser)]
#[command(name = "euler-inflow", version, about = "Euler flow through a channel with inflow and outflow walls")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the Picard iteration and write fields and diagnostics.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output.dir of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the operator once to the constant extension of u0.
    Linearize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the compatibility defects of the initial and inflow data.
    CheckCompat {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Recheck a finished run from its raw velocity output.
    Verify {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Bound on divergence, wall normal velocity and u(0) − u0.
        #[arg(long, default_value_t = 1e-8)]
        structural_tol: f64,
        /// Bound on the momentum residual.
        #[arg(long, default_value_t = 0.3)]
        residual_tol: f64,
        /// Bound on the inflow tangential trace defect.
        #[arg(long, default_value_t = 1e-2)]
        trace_tol: f64,
    },
    /// Manufactured-solution convergence tables.
    Mms {
        #[arg(long, value_enum, default_value_t = MmsCase::Pressure)]
        case: MmsCase,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Redraw SVG plots of a run directory from its CSV files.
    Plot {
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MmsCase {
    Pressure,
    BiotSavart,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Failed(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(IoError::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Solver(SolverError::Config(_)) => 2,
            _ => 1,
        }
    }
}

fn json_err(e: serde_json::Error) -> CliError {
    CliError::Io(IoError::Format(e.to_string()))
}

fn init_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("EULER_INFLOW_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| ConfigError::Invalid(format!("EULER_INFLOW_THREADS={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = init_threads().map_err(CliError::from).and_then(|_| match cli.cmd {
        Cmd::Solve { config, out } => solve(&config, out),
        Cmd::Linearize { config, out } => linearize(&config, out),
        Cmd::CheckCompat { config, json } => check_compat(&config, json),
        Cmd::Verify { run, config, structural_tol, residual_tol, trace_tol } => verify(&run, &config, [structural_tol, residual_tol, trace_tol]),
        Cmd::Mms { case, csv } => run_mms(case, csv.as_deref()),
        Cmd::Plot { run } => plot(&run),
    });
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn solve(config: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = SolverConfig::load(config)?;
    let p = Problem::new(&cfg)?;
    let sol = fixed_point_solve(&p, None)?;
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    io::write_solution(&dir, &sol, &cfg.output.fields, cfg.output.every)?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    let r = &sol.report;
    println!("iterations        {}", r.iterations.len());
    println!("converged         {}", r.converged);
    if let Some(c) = r.contraction.last() {
        println!("last contraction  {c:.3e}");
    }
    println!("momentum residual {:.3e}", r.momentum_residual);
    println!("trace defect      {:.3e}", r.trace_defect);
    println!("output            {}", dir.display());
    if r.converged {
        Ok(())
    } else {
        Err(CliError::Failed(format!("no convergence within {} iterations", cfg.tolerances.max_iterations)))
    }
}

fn linearize(config: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = SolverConfig::load(config)?;
    let p = Problem::new(&cfg)?;
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    fs::create_dir_all(&dir)?;
    let step = apply_a(&p, &p.initial_iterate(), 1)?;
    if let Some(h) = &step.h {
        io::write_inflow_vorticity(&dir.join("inflow_vorticity.csv"), h, p.dt())?;
    }
    let history = VelocityHistory::new(&step.input, Some(&p.curl_forcing));
    let surface = separating_surface(&history, &p.trace_options()).map_err(SolverError::from)?;
    vtk::write_points(&mut BufWriter::new(File::create(dir.join("separating_surface.vtk"))?), "separating surface", &surface, vtk::VtkFormat::Ascii)?;
    raw::write_series(&dir.join("velocity.f64"), "A(u0)", &p.grid, p.dt(), &step.v.slices)?;
    let summary = json!({
        "constraint": step.constraint,
        "eta": step.eta,
        "range": step.range,
        "harmonic": step.harmonic,
        "regions": step.omega.region_counts(),
        "sup_change": step.v.sub(&step.input).max_abs(),
        "surface_points": surface.len(),
    });
    fs::write(dir.join("linearize.json"), serde_json::to_string_pretty(&summary).map_err(json_err)?)?;
    println!("{}", serde_json::to_string_pretty(&summary).map_err(json_err)?);
    Ok(())
}

fn check_compat(config: &Path, as_json: bool) -> Result<(), CliError> {
    let cfg = SolverConfig::load(config)?;
    if cfg.mode != Mode::InflowOutflow {
        println!("mode {:?} has no inflow velocity data; nothing to check", cfg.mode);
        return Ok(());
    }
    let tol = cfg.tolerances.compat;
    // Build the problem without the hard trace rejection so the full table can be shown.
    let mut loose = cfg.clone();
    loose.tolerances.compat = f64::INFINITY;
    let p = Problem::new(&loose)?;
    let rep = p.compat.clone().expect("inflow mode reports compatibility");
    let cond0 = rep.cond0_passes(tol);
    let (v1, w1) = rep.cond1_verdicts(tol);
    if as_json {
        let out = json!({ "report": rep, "tol": tol, "cond0": cond0, "cond1_velocity": v1, "cond1_vorticity": w1, "ratio": rep.cond1_ratio() });
        println!("{}", serde_json::to_string_pretty(&out).map_err(json_err)?);
    } else {
        println!("{:<28} {:>12}", "defect", "value");
        for (name, v) in [
            ("tangential trace", rep.trace),
            ("cond0 velocity", rep.cond0_velocity),
            ("cond0 vorticity", rep.cond0_vorticity),
            ("cond1 velocity", rep.cond1_velocity),
            ("cond1 vorticity", rep.cond1_vorticity),
            ("pressure gap", rep.pressure_gap),
            ("vorticity/velocity ratio", rep.cond1_ratio()),
        ] {
            println!("{name:<28} {v:>12.3e}");
        }
        println!("inflow speed range [{:.3e}, {:.3e}]", rep.u_min, rep.u_max);
        println!("cond0 {}  cond1 velocity {}  cond1 vorticity {}", verdict(cond0), verdict(v1), verdict(w1));
    }
    if v1 != w1 {
        return Err(CliError::Failed("velocity and vorticity forms of the first-order condition disagree".into()));
    }
    if !(cond0 && v1) {
        return Err(CliError::Failed(format!("compatibility defects exceed {tol:e}")));
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify(run: &Path, config: &Path, [structural, residual, trace]: [f64; 3]) -> Result<(), CliError> {
    let cfg = SolverConfig::load(config)?;
    let p = Problem::new(&cfg)?;
    let (desc, slices) = raw::read_series(&run.join("velocity.f64"))?;
    if desc.grid != p.grid || slices.len() != p.nt() + 1 || (desc.dt - p.dt()).abs() > 1e-12 * p.dt() {
        return Err(CliError::Failed(format!("{} was not produced by this configuration", run.display())));
    }
    let u = euler_inflow::fields::SpaceTimeVelocity { grid: p.grid, dt: p.dt(), slices };
    let pressures = solver::true_pressures(&p, &u);
    let res = solver::momentum_residual(&p, &u, &pressures).iter().map(|r| r.max_abs()).fold(0.0, f64::max);
    let checks = [
        ("divergence", u.max_divergence(), structural),
        ("wall normal velocity", solver::normal_trace_defect(&p, &u), structural),
        ("initial value", (&u.slices[0] - &p.u0).max_abs(), structural),
        ("momentum residual", res, residual),
        ("inflow tangential trace", solver::tangential_trace_defect(&p, &u), trace),
    ];
    let mut ok = true;
    for (name, v, tol) in checks {
        let pass = v <= tol;
        ok &= pass;
        println!("{} {name:<24} {v:.3e} (tol {tol:.1e})", verdict(pass));
    }
    info!("verified {} slices", u.slices.len());
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("run failed verification".into()))
    }
}

fn run_mms(case: MmsCase, csv_path: Option<&Path>) -> Result<(), CliError> {
    let (tables, ok): (Vec<(&str, Vec<MmsRow>)>, bool) = match case {
        MmsCase::Pressure => {
            let z = mms::pressure_z_study(8, &[9, 17, 33, 65]);
            let plane = mms::pressure_plane_study(&[4, 8, 16, 32], 9);
            let ok = z.iter().skip(1).all(|r| r.order.unwrap_or(0.0) >= 1.9) && plane.last().is_some_and(|r| r.error < 1e-11);
            (vec![("pressure-z", z), ("pressure-plane", plane)], ok)
        }
        MmsCase::BiotSavart => {
            let r = mms::biot_savart_study(&[8, 16, 32]);
            let ok = r.iter().skip(1).all(|r| r.order.unwrap_or(0.0) >= 1.8);
            (vec![("biot-savart", r)], ok)
        }
    };
    let mut w = match csv_path {
        Some(path) => Some(csv::Writer::from_path(path).map_err(|e| IoError::Format(e.to_string()))?),
        None => None,
    };
    if let Some(w) = w.as_mut() {
        w.write_record(["study", "n1", "n3", "error", "order"]).map_err(|e| IoError::Format(e.to_string()))?;
    }
    println!("{:<16} {:>5} {:>5} {:>12} {:>7}", "study", "n1", "n3", "error", "order");
    for (name, rows) in &tables {
        for r in rows {
            let order = r.order.map_or(String::from("-"), |o| format!("{o:.2}"));
            println!("{name:<16} {:>5} {:>5} {:>12.3e} {order:>7}", r.n1, r.n3, r.error);
            if let Some(w) = w.as_mut() {
                w.write_record([name.to_string(), r.n1.to_string(), r.n3.to_string(), format!("{:.17e}", r.error), order]).map_err(|e| IoError::Format(e.to_string()))?;
            }
        }
    }
    if let Some(mut w) = w {
        w.flush()?;
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("observed order below the expected order".into()))
    }
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let fmt = |e: csv::Error| CliError::Io(IoError::Format(e.to_string()));
    let mut r = csv::Reader::from_path(path).map_err(fmt)?;
    let names: Vec<String> = r.headers().map_err(fmt)?.iter().map(String::from).collect();
    let mut cols = vec![Vec::new(); names.len()];
    for rec in r.records() {
        let rec = rec.map_err(fmt)?;
        for (c, v) in rec.iter().enumerate() {
            cols[c].push(v.parse::<f64>().unwrap_or(f64::NAN));
        }
    }
    Ok((names, cols))
}

fn plot(run: &Path) -> Result<(), CliError> {
    let (names, cols) = read_csv(&run.join("iterations.csv"))?;
    let pick = |n: &str| names.iter().position(|x| x == n);
    let series: Vec<svg::Series> = ["diff_holder", "diff_x", "sup_diff"]
        .iter()
        .filter_map(|&n| pick(n).map(|c| svg::Series { label: n.into(), points: cols[0].iter().copied().zip(cols[c].iter().copied()).collect() }))
        .collect();
    fs::write(run.join("convergence.svg"), svg::line_plot("Picard convergence", "iteration", "norm of u_{k+1} - u_k", &series, true))?;

    let (names, cols) = read_csv(&run.join("norms.csv"))?;
    let series: Vec<svg::Series> = names
        .iter()
        .enumerate()
        .skip(1)
        .map(|(c, n)| svg::Series { label: n.clone(), points: cols[0].iter().copied().zip(cols[c].iter().copied()).collect() })
        .collect();
    fs::write(run.join("norms.svg"), svg::line_plot("Norm time series", "t", "value", &series, true))?;
    println!("wrote {} and {}", run.join("convergence.svg").display(), run.join("norms.svg").display());
    Ok(())
}
