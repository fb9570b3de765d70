//! Library-level checks on the shipped configurations and reference mesh.

use std::path::Path;

use haptofv::diagnostics::front_radius;
use haptofv::initial_conditions::{build_field, InitSpec};
use haptofv::mesh::{generate_unit_square_mesh, DistMeshOptions};
use haptofv::model::Variant;
use haptofv::simio::experiments::{build_mesh, initial_state, simulate};
use haptofv::simio::{load_config, RunConfig};
use haptofv::TriMesh;

fn shipped(name: &str) -> RunConfig {
    load_config(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("configs")
            .join(name),
    )
    .unwrap()
}

fn reference_mesh() -> TriMesh {
    generate_unit_square_mesh(0.05, 2000, &DistMeshOptions::default()).unwrap()
}

#[test]
fn reference_mesh_is_frozen() {
    let m = reference_mesh();
    m.verify(1.0).unwrap();
    assert_eq!(m.n_cells(), 899);
    assert!(m.min_quality() > 0.8);
}

#[test]
fn uniform_random_tissue_has_mean_one_half() {
    let m = reference_mesh();
    let v = build_field(&m, &InitSpec::UniformRandomV { seed: 20240607 }).unwrap();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    assert!((0.45..0.55).contains(&mean), "{mean}");
    assert!(v.iter().all(|&x| x > 0.0 && x < 1.0));
}

#[test]
fn gaussian_front_radius_matches_inversion() {
    let m = reference_mesh();
    let c = build_field(&m, &InitSpec::reference_c()).unwrap();
    let r = front_radius(&m, &c, [0.5, 0.5], 1e-6);
    let exact = 0.08 * (2.0 * 1e6f64.ln()).sqrt();
    assert!((r - exact).abs() <= m.max_edge_length(), "{r} vs {exact}");
}

#[test]
fn shipped_configs_load_and_build() {
    for name in ["paper_degenerate.toml", "annular_gap.toml"] {
        let cfg = shipped(name);
        let m = build_mesh(&cfg).unwrap();
        let s = initial_state(&m, &cfg).unwrap();
        assert_eq!(s.c.len(), m.n_cells());
    }
}

#[test]
fn degenerate_support_trails_early() {
    let mut cfg = shipped("paper_degenerate.toml");
    cfg.mesh.h = Some(0.1);
    cfg.time.t_end = 7.0;
    cfg.time.snapshot_times = vec![7.0];
    let m = build_mesh(&cfg).unwrap();
    let init = initial_state(&m, &cfg).unwrap();
    let deg = simulate(&m, &init, &cfg, cfg.model).unwrap();
    let non = simulate(
        &m,
        &init,
        &cfg,
        cfg.model.with_variant(Variant::Nondegenerate),
    )
    .unwrap();
    let (a, b) = (&deg.snapshots[0].diagnostics, &non.snapshots[0].diagnostics);
    assert!(
        a.support_fraction_c < b.support_fraction_c,
        "{} vs {}",
        a.support_fraction_c,
        b.support_fraction_c
    );
    assert!(a.zero_set_violations == 0 && a.all_finite() && b.all_finite());
}
