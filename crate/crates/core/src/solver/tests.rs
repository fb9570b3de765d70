use super::*;
use crate::diagnostics::DiagnosticsConfig;
use crate::mesh::{generate_unit_square_mesh, DistMeshOptions};
use crate::model::Variant;
use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> ModelParams<f64> {
    ModelParams::reference(Variant::Degenerate)
}

fn mesh(h: f64) -> TriMesh<f64> {
    generate_unit_square_mesh(h, 1000, &DistMeshOptions::default()).unwrap()
}

fn solver<'m>(m: &'m TriMesh<f64>, p: ModelParams<f64>) -> Solver<'m, f64> {
    Solver::new(m, p, SolverOptions::default()).unwrap()
}

fn random_state(m: &TriMesh<f64>, seed: u64) -> SimState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..m.n_cells())
        .map(|_| rng.random_range(0.0..2.0))
        .collect();
    let v: Vec<f64> = (0..m.n_cells())
        .map(|_| rng.random_range(0.0..=1.0))
        .collect();
    SimState::new(0.0, c.into(), v.into())
}

#[test]
fn gradient_of_linear_field_points_right() {
    let m = mesh(0.1);
    let v: Vec<f64> = m.cell_centroids().iter().map(|p| p[0]).collect();
    for scheme in [GradientScheme::TwoPoint, GradientScheme::ComponentQuotient] {
        for (ei, e) in m.interior_edges() {
            let r = e.right.unwrap();
            let g = edge_gradient(&m, &v, ei, scheme);
            let dx = m.centroid(r)[0] - m.centroid(e.left)[0];
            if dx > 0.0 {
                assert!(g[0] > 0.0, "{scheme:?} edge {ei}");
            }
            // Swapping the orientation flips the sign.
            let swapped: Vec<f64> = v.iter().map(|x| -x).collect();
            assert_eq!(edge_gradient(&m, &swapped, ei, scheme)[0], -g[0]);
        }
    }
}

/// Hand evaluation of gradient -> velocity -> Godunov -> update for the
/// two-triangle square with c = (1, 0), v = (0, 1), written without the solver.
#[test]
fn two_triangle_advection_matches_hand_calculation() {
    let m = TriMesh::<f64>::two_triangle_square();
    // Cell 0: (0,0),(1,0),(1,1); cell 1: (0,0),(1,1),(0,1).
    let (x0, y0) = (2.0 / 3.0, 1.0 / 3.0);
    let (x1, y1) = (1.0 / 3.0, 2.0 / 3.0);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let d2 = dx * dx + dy * dy;
    let (gx, gy) = ((1.0 - 0.0) * dx / d2, (1.0 - 0.0) * dy / d2);
    let chi = 0.5 * (1.0 / 1.0f64.powi(2) + 1.0 / 2.0f64.powi(2));
    let s = 1.0 / 2f64.sqrt();
    let (nx, ny) = (-s, s);
    let a = chi * gx * nx + chi * gy * ny;
    let len = 2f64.sqrt();
    let flux = if a > 0.0 { a * 1.0 } else { a * 0.0 };
    let dt = 0.01;
    let want = [1.0 - dt / 0.5 * len * flux, 0.0 + dt / 0.5 * len * flux];
    assert_abs_diff_eq!(want[0], 0.9625, epsilon = 1e-14);

    let sv = solver(&m, params());
    let st = SimState::new(0.0, vec![1.0, 0.0].into(), vec![0.0, 1.0].into());
    let c_star = sv.advection_step(&st, dt).unwrap();
    assert_abs_diff_eq!(c_star[0], want[0], epsilon = 1e-14);
    assert_abs_diff_eq!(c_star[1], want[1], epsilon = 1e-14);

    // The per-component quotient gives a zero normal speed on the diagonal.
    let o = SolverOptions {
        gradient: GradientScheme::ComponentQuotient,
        ..Default::default()
    };
    let cq = Solver::new(&m, params(), o).unwrap();
    assert_eq!(&cq.advection_step(&st, dt).unwrap()[..], &[1.0, 0.0]);
}

#[test]
fn constant_tissue_means_no_transport() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let mut st = random_state(&m, 1);
    st.v = CellField::constant(m.n_cells(), 0.37);
    assert_eq!(sv.advection_step(&st, 0.01).unwrap(), st.c);
}

#[test]
fn advection_conserves_mass_and_positivity() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    for seed in 0..20 {
        let st = random_state(&m, seed);
        let dt = sv.compute_dt(&st, 0.45).unwrap();
        let c_star = sv.advection_step(&st, dt).unwrap();
        let (before, after) = (st.c.integral(&m), c_star.integral(&m));
        assert!((after - before).abs() <= 1e-12 * before);
        assert!(c_star.min() >= 0.0);
    }
}

#[test]
fn cfl_violation_is_refused() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let st = random_state(&m, 3);
    let err = sv.advection_step(&st, 10.0).unwrap_err();
    assert!(matches!(err, SolverError::Cfl { .. }), "{err}");
}

#[test]
fn flat_c_is_pure_reaction() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let v: Vec<f64> = (0..m.n_cells())
        .map(|_| rng.random_range(0.0..=1.0))
        .collect();
    let c = vec![0.4; m.n_cells()];
    let dt = 0.01;
    let out = sv.diffusion_reaction_step(&c, &v, dt).unwrap();
    for i in 0..m.n_cells() {
        let want = 0.4 + dt * 0.5 * 0.4 * (1.0 - 0.4 - v[i]);
        assert_abs_diff_eq!(out[i], want, epsilon = 1e-15);
    }
}

#[test]
fn logistic_equilibrium_preserved() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let n = m.n_cells();
    let out = sv
        .diffusion_reaction_step(&vec![1.0; n], &vec![0.0; n], 0.05)
        .unwrap();
    assert!(out.iter().all(|&x| x == 1.0));
}

fn logistic(c0: f64, mu: f64, t: f64) -> f64 {
    c0 * (mu * t).exp() / (1.0 - c0 + c0 * (mu * t).exp())
}

#[test]
fn degenerate_without_tissue_is_logistic_growth() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let n = m.n_cells();
    let v = vec![0.0; n];
    let mut c = vec![0.1; n];
    // Spatial variation must not matter: the coefficient vanishes with v.
    c[0] = 0.3;
    let dt = 1e-4;
    for _ in 0..10_000 {
        c = sv.diffusion_reaction_step(&c, &v, dt).unwrap().into_inner();
    }
    let want = logistic(0.1, 0.5, 1.0);
    assert!((c[1] - want).abs() / want < 1e-3);
    let want0 = logistic(0.3, 0.5, 1.0);
    assert!((c[0] - want0).abs() / want0 < 1e-3);
}

#[test]
fn ode_step_examples() {
    let m = TriMesh::<f64>::two_triangle_square();
    let sv = solver(&m, params());
    let st = SimState::new(0.0, vec![5.0, 0.0].into(), vec![0.0, 1.0].into());
    assert_eq!(&sv.ode_step_v(&st, 0.01).unwrap()[..], &[0.0, 1.0]);
    let st = SimState::new(0.0, vec![1.0, 1.0].into(), vec![0.5, 0.5].into());
    assert_abs_diff_eq!(
        sv.ode_step_v(&st, 0.01).unwrap()[0],
        0.49955,
        epsilon = 1e-15
    );
    let err = sv.ode_step_v(&st, 100.0).unwrap_err();
    assert!(matches!(err, SolverError::ReactionBound { .. }));
}

#[test]
fn compute_dt_unconstrained() {
    let m = mesh(0.2);
    let mut p = params();
    (p.kappa_c, p.kappa_v, p.mu_c, p.mu_v, p.lambda_, p.eta) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let sv = solver(&m, p);
    let st = random_state(&m, 5);
    assert_eq!(sv.compute_dt(&st, 0.45).unwrap(), sv.options().dt_max);
}

#[test]
fn compute_dt_scales_with_safety() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let st = random_state(&m, 6);
    let a = sv.compute_dt(&st, 1.0).unwrap();
    let b = sv.compute_dt(&st, 0.5).unwrap();
    assert!(a < sv.options().dt_max);
    assert_eq!(b, 0.5 * a);
}

#[test]
fn compute_dt_reaction_bound() {
    // No transport, so only the reaction bound is active.
    let m = mesh(0.2);
    let mut p = params();
    p.kappa_v = 0.0;
    p.kappa_c = 0.0;
    let sv = Solver::new(
        &m,
        p,
        SolverOptions {
            dt_max: 1e9,
            ..Default::default()
        },
    )
    .unwrap();
    let n = m.n_cells();
    let s1 = SimState::new(0.0, vec![3.0; n].into(), vec![0.5; n].into());
    let s2 = SimState::new(0.0, vec![6.0; n].into(), vec![0.5; n].into());
    let bound = |cmax: f64| 0.45 / (p.mu_c * (1.0 + p.eta + cmax) + p.lambda_ * cmax + p.mu_v);
    let (d1, d2) = (
        sv.compute_dt(&s1, 0.45).unwrap(),
        sv.compute_dt(&s2, 0.45).unwrap(),
    );
    assert_abs_diff_eq!(d1, bound(3.0), epsilon = 1e-15);
    assert_abs_diff_eq!(d2, bound(6.0), epsilon = 1e-15);
    assert!(d2 >= 0.5 * d1 * (1.0 - 1e-15));
}

#[test]
fn compute_dt_rejects_nan() {
    let m = mesh(0.2);
    let sv = solver(&m, params());
    let mut st = random_state(&m, 7);
    st.c[3] = f64::NAN;
    assert!(matches!(
        sv.compute_dt(&st, 0.45),
        Err(SolverError::NonFinite { cell: 3, .. })
    ));
}

#[test]
fn zero_tumour_stays_zero() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let mut st = random_state(&m, 8);
    st.c = CellField::constant(m.n_cells(), 0.0);
    let dt = sv.compute_dt(&st, 0.45).unwrap();
    let (next, _) = sv.step(&st, dt).unwrap();
    assert!(next.c.iter().all(|&c| c == 0.0));
    for i in 0..m.n_cells() {
        let v = st.v[i];
        assert_abs_diff_eq!(next.v[i], v + dt * 0.02 * v * (1.0 - v), epsilon = 1e-16);
    }
}

#[test]
fn equilibrium_is_fixed_point() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let n = m.n_cells();
    let st = SimState::new(0.0, vec![0.0; n].into(), vec![1.0; n].into());
    let (next, _) = sv.step(&st, 0.05).unwrap();
    assert_eq!(next.c, st.c);
    assert_eq!(next.v, st.v);
}

#[test]
fn randomized_steps_keep_invariants() {
    let m = mesh(0.1);
    for variant in [Variant::Degenerate, Variant::Nondegenerate] {
        let sv = solver(&m, params().with_variant(variant));
        for seed in 0..25 {
            let mut st = random_state(&m, 100 + seed);
            for _ in 0..5 {
                let dt = sv.compute_dt(&st, 0.45).unwrap();
                st = sv.step(&st, dt).unwrap().0;
                assert!(st.c.min() >= 0.0);
                assert!(st.v.min() >= 0.0 && st.v.max() <= 1.0);
            }
        }
    }
    let sv = solver(&m, params().regularized(0.05, 0.05, 5.0));
    let mut st = random_state(&m, 999);
    for _ in 0..20 {
        let dt = sv.compute_dt(&st, 0.45).unwrap();
        st = sv.step(&st, dt).unwrap().0;
    }
    assert!(st.c.min() >= 0.0);
}

#[test]
fn zero_set_preserved_over_steps() {
    let m = mesh(0.1);
    let sv = solver(&m, params());
    let mut st = random_state(&m, 11);
    for i in (0..m.n_cells()).step_by(3) {
        st.v[i] = 0.0;
    }
    let zeros: Vec<usize> = (0..m.n_cells()).filter(|&i| st.v[i] == 0.0).collect();
    for _ in 0..200 {
        let dt = sv.compute_dt(&st, 0.45).unwrap();
        st = sv.step(&st, dt).unwrap().0;
    }
    assert!(zeros.iter().all(|&i| st.v[i] == 0.0));
}

fn spec(t_end: f64, snaps: Vec<f64>) -> RunSpec<f64> {
    RunSpec {
        t_end,
        snapshot_times: snaps,
        time_step: TimeStep::Adaptive { cfl_safety: 0.45 },
        diagnostics: DiagnosticsConfig::default(),
    }
}

#[test]
fn empty_run_returns_initial() {
    let m = mesh(0.2);
    let sv = solver(&m, params());
    let st = random_state(&m, 12);
    let out = sv.run(st.clone(), &spec(0.0, vec![])).unwrap();
    assert_eq!(out.snapshots.len(), 1);
    assert_eq!(out.snapshots[0].state, st);
    assert_eq!(out.stats.steps, 0);
}

#[test]
fn run_takes_snapshots_at_first_step_past_request() {
    let m = mesh(0.2);
    let sv = solver(&m, params());
    let st = random_state(&m, 13);
    let out = sv.run(st, &spec(0.5, vec![0.0, 0.1, 0.25, 0.5])).unwrap();
    assert_eq!(out.snapshots.len(), 4);
    assert_eq!(out.snapshots[0].state.t, 0.0);
    for s in &out.snapshots {
        assert!(s.state.t >= s.requested_t);
    }
    assert_eq!(out.snapshots[3].state.t, 0.5);
    assert_eq!(out.final_state.t, 0.5);
}

#[test]
fn run_is_deterministic() {
    let m = mesh(0.2);
    let sv = solver(&m, params());
    let st = random_state(&m, 14);
    let a = sv.run(st.clone(), &spec(0.3, vec![0.1, 0.3])).unwrap();
    let b = sv.run(st, &spec(0.3, vec![0.1, 0.3])).unwrap();
    assert_eq!(a, b);
}

#[test]
fn run_rejects_bad_spec() {
    let m = mesh(0.2);
    let sv = solver(&m, params());
    let st = random_state(&m, 15);
    assert!(sv.run(st.clone(), &spec(1.0, vec![0.5, 0.2])).is_err());
    assert!(sv.run(st.clone(), &spec(1.0, vec![2.0])).is_err());
    let mut late = st;
    late.t = 2.0;
    assert!(sv.run(late, &spec(1.0, vec![])).is_err());
}

#[test]
fn failing_run_returns_last_good_state() {
    let m = mesh(0.2);
    let sv = solver(&m, params());
    let st = random_state(&m, 16);
    let s = RunSpec {
        time_step: TimeStep::Fixed { dt: 5.0 },
        ..spec(10.0, vec![])
    };
    let fail = sv.run(st.clone(), &s).unwrap_err();
    assert_eq!(fail.last_state, st);
    assert!(matches!(fail.error, SolverError::Cfl { .. }));
}

#[test]
fn harmonic_averaging_runs() {
    let m = mesh(0.1);
    let o = SolverOptions {
        diffusion_averaging: EdgeAveraging::Harmonic,
        ..Default::default()
    };
    let sv = Solver::new(&m, params(), o).unwrap();
    let mut st = random_state(&m, 17);
    for _ in 0..10 {
        let dt = sv.compute_dt(&st, 0.45).unwrap();
        st = sv.step(&st, dt).unwrap().0;
    }
    assert!(st.c.min() >= 0.0);
    assert_eq!(EdgeAveraging::Harmonic.combine(0.0, 1.0), 0.0);
    assert_eq!(EdgeAveraging::Arithmetic.combine(0.0, 1.0), 0.5);
}

#[test]
fn single_precision_step() {
    let m = generate_unit_square_mesh(0.2f32, 500, &DistMeshOptions::default()).unwrap();
    let sv = Solver::new(
        &m,
        ModelParams::<f32>::reference(Variant::Degenerate),
        SolverOptions::default(),
    )
    .unwrap();
    let n = m.n_cells();
    let st = SimState::new(0.0f32, vec![0.5f32; n].into(), vec![0.25f32; n].into());
    let dt = sv.compute_dt(&st, 0.45).unwrap();
    let (next, _) = sv.step(&st, dt).unwrap();
    assert!(next.c.min() > 0.5);
}
