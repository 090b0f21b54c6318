use std::path::PathBuf;

use euler_inflow::solver::config::SolverConfig;
use euler_inflow::solver::{apply_a, fixed_point_solve, Problem};

fn config(name: &str) -> SolverConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    SolverConfig::load(&path).unwrap()
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    for name in ["steady.toml", "perturbed.toml", "vorticity_bc.toml"] {
        let cfg = config(name);
        cfg.validate().unwrap();
        assert_eq!(SolverConfig::from_toml(&cfg.to_toml()).unwrap(), cfg, "{name}");
    }
}

#[test]
fn every_iterate_keeps_the_initial_value() {
    let p = Problem::new(&config("perturbed.toml")).unwrap();
    let mut u = p.initial_iterate();
    for k in 1..=3 {
        let step = apply_a(&p, &u, k).unwrap();
        assert_eq!(step.v.slices[0].c, p.u0.c, "iterate {k}");
        u = step.v;
    }
}

#[test]
fn same_seed_gives_identical_runs() {
    let p = Problem::new(&config("perturbed.toml")).unwrap();
    let a = fixed_point_solve(&p, None).unwrap();
    let b = fixed_point_solve(&p, None).unwrap();
    assert_eq!(serde_json::to_string(&a.report.iterations).unwrap(), serde_json::to_string(&b.report.iterations).unwrap());
    for (x, y) in a.u.slices.iter().zip(&b.u.slices) {
        assert_eq!(x.c, y.c);
    }
}
