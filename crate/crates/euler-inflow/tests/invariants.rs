use std::f64::consts::PI;

use proptest::prelude::*;

use euler_inflow::boundary_data::{generate_h, w_of_up, InflowTraces};
use euler_inflow::fields::{holder_seminorm, interpolate_vector, ops, Axis, Grid3, HolderSampling, PlaneField, ScalarField, SpaceTimeSamples, SpaceTimeVelocity, VectorField};
use euler_inflow::flow_map::{grad_eta, trace, TraceOptions, VelocityHistory};
use euler_inflow::geometry::{cross_tangential, perp, tangential_decompose, Wall, WallCalculus};
use euler_inflow::pressure::poisson::{discrete_laplacian, solve_neumann};
use euler_inflow::pressure::{solve_q, InflowTrace};
use euler_inflow::recovery::{biot_savart, Background, BackgroundKind, BackgroundSpec, TangentialSpec};

fn grid() -> Grid3 {
    Grid3::new(8, 8, 9, 1.0, 1.0).unwrap()
}

/// Σ aᵢ cos(2π(k·x) + φ) cos(πmz) per component.
fn field(g: Grid3, terms: &[([f64; 3], [i32; 2], f64, u8)]) -> VectorField {
    VectorField::from_fn(g, |x| {
        let mut v = [0.0; 3];
        for (a, k, ph, m) in terms {
            let s = (2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) + ph).cos() * (PI * *m as f64 * x[2]).cos();
            for d in 0..3 {
                v[d] += a[d] * s;
            }
        }
        v
    })
}

fn terms() -> impl Strategy<Value = Vec<([f64; 3], [i32; 2], f64, u8)>> {
    prop::collection::vec((prop::array::uniform3(-1.0..1.0f64), prop::array::uniform2(-2..=2i32), 0.0..std::f64::consts::TAU, 0u8..3), 1..4)
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0..2.0f64)
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 1e-3).then(|| v.map(|c| c / n))
}

proptest! {
    #[test]
    fn decomposition_perp_and_cross(nv in vec3(), u in vec3(), v in vec3()) {
        let Some(n) = unit(nv) else { return Ok(()) };
        let (un, ut) = tangential_decompose(n, u);
        let dot = ut[0] * n[0] + ut[1] * n[1] + ut[2] * n[2];
        prop_assert!(dot.abs() < 1e-14);
        for d in 0..3 {
            prop_assert!((un * n[d] + ut[d] - u[d]).abs() < 1e-14);
        }
        let twice = perp(n, perp(n, ut).unwrap()).unwrap();
        for d in 0..3 {
            prop_assert!((twice[d] + ut[d]).abs() < 1e-14);
        }
        let c = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let direct = tangential_decompose(n, c).1;
        let formula = cross_tangential(n, u, v);
        for d in 0..3 {
            prop_assert!((direct[d] - formula[d]).abs() < 1e-14 * 16.0);
        }
    }

    #[test]
    fn div_curl_linear_and_div_of_curl_vanishes(a in terms(), b in terms(), s in -2.0..2.0f64) {
        let g = grid();
        let (fa, fb) = (field(g, &a), field(g, &b));
        let mut comb = fa.clone();
        comb.axpy(s, &fb);
        let lin = &ops::curl3(&comb) - &(&ops::curl3(&fa) + &(&ops::curl3(&fb) * s));
        prop_assert!(lin.max_abs() < 1e-11);
        let d = ops::divergence(&comb).data.iter().zip(ops::divergence(&fa).data.iter().zip(&ops::divergence(&fb).data)).map(|(c, (x, y))| (c - x - s * y).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-11);
        prop_assert!(ops::divergence(&ops::curl3(&comb)).max_abs() < 1e-10);
    }

    #[test]
    fn interpolation_hits_nodes(a in terms(), p in 0usize..576, m in 0usize..3) {
        let g = grid();
        let slices: Vec<VectorField> = (0..3).map(|k| &field(g, &a) * (1.0 + k as f64)).collect();
        let x = g.point(p);
        let v = interpolate_vector(&slices, 0.5, m as f64 * 0.5, x).unwrap();
        let e = slices[m].at(p);
        for d in 0..3 {
            prop_assert!((v[d] - e[d]).abs() < 1e-12);
        }
    }

    #[test]
    fn holder_seminorm_is_subadditive(a in terms(), b in terms(), alpha in 0.1..1.0f64) {
        let g = grid();
        let sampling = HolderSampling::default();
        let st = |f: &VectorField| SpaceTimeSamples::from_velocity(&SpaceTimeVelocity::constant(f, 2, 0.1));
        let (fa, fb) = (field(g, &a), field(g, &b));
        let sum = &fa + &fb;
        let lhs = holder_seminorm(&st(&sum), alpha, Axis::Space, &sampling);
        let rhs = holder_seminorm(&st(&fa), alpha, Axis::Space, &sampling) + holder_seminorm(&st(&fb), alpha, Axis::Space, &sampling);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn biot_savart_is_linear_solenoidal_and_mean_free(a in terms(), b in terms(), s in -2.0..2.0f64) {
        let g = grid();
        let (wa, wb) = (field(g, &a), field(g, &b));
        let mut comb = wa.clone();
        comb.axpy(s, &wb);
        let k = biot_savart(&comb);
        let lin = &k - &(&biot_savart(&wa) + &(&biot_savart(&wb) * s));
        prop_assert!(lin.max_abs() < 1e-12 * (1.0 + k.max_abs()));
        prop_assert!(ops::divergence(&k).max_abs() < 1e-10);
        prop_assert!(k.normal(Wall::Top).max_abs() < 1e-12 && k.normal(Wall::Bottom).max_abs() < 1e-12);
        let m = k.mean();
        prop_assert!(m[0].abs() < 1e-13 && m[1].abs() < 1e-13);
    }

    #[test]
    fn poisson_rows_are_exact_and_mean_free(a in terms(), t in terms()) {
        let g = grid();
        let src = field(g, &a).component(0);
        let top = PlaneField { grid: g.plane(), data: field(g, &t).component(1).wall(Wall::Top).data };
        let bottom = PlaneField::zeros(g.plane());
        let s = solve_neumann(&src, &top, &bottom);
        let lap = discrete_laplacian(&s.q);
        let np = g.plane_len();
        let scale = 1.0 + src.max_abs();
        for k in 1..g.n3 - 1 {
            for p in 0..np {
                prop_assert!((lap.data[k * np + p] - src.data[k * np + p]).abs() < 1e-10 * scale);
            }
        }
        let q = &s.q;
        prop_assert!(q.mean().abs() <= 1e-12 * q.max_abs().max(1e-300));
    }

    #[test]
    fn inflow_normal_vorticity_has_zero_flux(speed in 0.5..1.5f64, bump in -0.2..0.2f64, s0 in -0.5..0.5f64, s1 in -0.5..0.5f64, c1 in -0.3..0.3f64, t in 0.0..0.1f64) {
        let g = grid();
        let spec = BackgroundSpec {
            kind: BackgroundKind::General,
            inflow_speed: speed,
            oscillation: 0.2,
            bump,
            tangential: TangentialSpec::Shear { s0, s1, c1, c2: -c1 },
            ..Default::default()
        };
        let bg = Background::new(g, 4, 0.025, &spec).unwrap();
        let wc = WallCalculus::new(g.plane());
        let u = bg.full(t);
        let tr = InflowTraces::at_time(&bg, t);
        let q = solve_q(&wc, &u, Some(InflowTrace { un: &tr.un, bg_tau: &tr.tau }), [&bg.normal_dt_at(Wall::Top, t), &bg.normal_dt_at(Wall::Bottom, t)]);
        let f = VectorField::zeros(g);
        let h = generate_h(&wc, &u, &q.q, &tr, &f);
        prop_assert!(wc.integrate(&h.normal).abs() < 1e-13);
        // with the background as the velocity, the generated data is W(u, p) itself
        let w = w_of_up(&wc, &u, &tr.tau_dt, &q.q, &f);
        let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(gap(&h.tangential.x, &w.tangential.x) < 1e-13 && gap(&h.tangential.y, &w.tangential.y) < 1e-13);
        prop_assert!(gap(&h.normal.data, &w.normal.data) < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn characteristics_compose_and_preserve_volume(a in terms(), x in prop::array::uniform3(0.0..1.0f64), t2 in 0.02..0.08f64) {
        let g = grid();
        // impermeable, discretely solenoidal velocity
        let mut u = biot_savart(&field(g, &a));
        let s = 0.5 / u.max_abs().max(0.5);
        u = &u * s;
        let h = VelocityHistory::new(&SpaceTimeVelocity::constant(&u, 4, 0.025), None);
        let opts = TraceOptions { ode_dt: 1e-3, impermeable: true };
        let x = [x[0], x[1], 0.1 + 0.8 * x[2]];
        let direct = trace(&h, 0.1, 0.0, x, &opts).unwrap();
        let mid = trace(&h, 0.1, t2, x, &opts).unwrap();
        let composed = trace(&h, t2, 0.0, mid, &opts).unwrap();
        for d in 0..3 {
            prop_assert!((direct[d] - composed[d]).abs() < 1e-6, "{direct:?} {composed:?}");
        }
        let j = grad_eta(&h, 0.1, 0.0, x, &opts).unwrap();
        let det = j[0] * (j[4] * j[8] - j[5] * j[7]) - j[1] * (j[3] * j[8] - j[5] * j[6]) + j[2] * (j[3] * j[7] - j[4] * j[6]);
        prop_assert!((det - 1.0).abs() < 1e-5, "det {det}");
    }
}

#[test]
fn scalar_interpolation_is_linear_in_time() {
    let g = grid();
    let a = ScalarField::from_fn(g, |x| x[0]);
    let b = ScalarField::from_fn(g, |x| 3.0 * x[0]);
    let v = euler_inflow::fields::interpolate_scalar(&[a, b], 1.0, 0.5, g.point(3)).unwrap();
    assert!((v - 2.0 * g.point(3)[0]).abs() < 1e-12);
}
