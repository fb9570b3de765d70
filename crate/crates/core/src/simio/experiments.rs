//! End-to-end drivers: single runs, the degenerate/nondegenerate
//! comparison, and the regularization study.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::config::{ConfigError, DtMode, RunConfig};
use super::output::{self, format_diagnostics, snapshot_file_name};
use crate::diagnostics::{DiagnosticsConfig, CSV_HEADER};
use crate::format::{fmt_float, FileError};
use crate::initial_conditions::{build_field, InitError};
use crate::mesh::{self, DistMeshOptions, MeshError};
use crate::model::{ModelParams, Variant};
use crate::solver::{RunFailure, RunOutput, RunSpec, Solver, SolverError, SolverOptions, TimeStep};
use crate::state::SimState;
use crate::TriMesh;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Init(#[from] InitError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Run(#[from] Box<RunFailure<f64>>),
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    /// Short machine-readable category for the CLI's error line.
    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Config(_) => "config",
            AppError::File(_) => "file",
            AppError::Mesh(_) => "mesh",
            AppError::Init(_) => "initial-condition",
            AppError::Solver(_) => "solver",
            AppError::Run(_) => "run",
            AppError::Usage(_) => "usage",
        }
    }
}

pub fn build_mesh(cfg: &RunConfig) -> Result<TriMesh, AppError> {
    let mesh = match (&cfg.mesh.h, &cfg.mesh.file) {
        (_, Some(path)) => mesh::io::load_mesh(path)?,
        (Some(h), None) => {
            let opts = DistMeshOptions {
                seed: cfg.mesh.seed,
                ..Default::default()
            };
            mesh::generate_unit_square_mesh(*h, cfg.mesh.relaxation_iters, &opts)?
        }
        (None, None) => unreachable!("validated config"),
    };
    mesh.verify(1.0)?;
    Ok(mesh)
}

pub fn initial_state(mesh: &TriMesh, cfg: &RunConfig) -> Result<SimState<f64>, AppError> {
    let c = build_field(mesh, &cfg.initial.c)?;
    let v = build_field(mesh, &cfg.initial.v)?;
    let mut s = SimState::new(0.0, c, v);
    s.enforce_invariants(mesh.n_cells())
        .map_err(SolverError::from)?;
    Ok(s)
}

pub fn solver_options(cfg: &RunConfig) -> SolverOptions<f64> {
    SolverOptions {
        gradient: cfg.solver.gradient,
        diffusion_averaging: cfg.solver.diffusion_averaging,
        dt_max: cfg.time.dt_max,
    }
}

pub fn run_spec(cfg: &RunConfig) -> RunSpec<f64> {
    RunSpec {
        t_end: cfg.time.t_end,
        snapshot_times: cfg.time.snapshot_times.clone(),
        time_step: match cfg.time.dt {
            DtMode::Adaptive { cfl_safety } => TimeStep::Adaptive { cfl_safety },
            DtMode::Fixed { dt } => TimeStep::Fixed { dt },
        },
        diagnostics: DiagnosticsConfig {
            c_tol: cfg.output.c_tol,
            center: cfg.output.center,
        },
    }
}

/// Runs `cfg` with `params` on an existing mesh and initial state.
pub fn simulate(
    mesh: &TriMesh,
    initial: &SimState<f64>,
    cfg: &RunConfig,
    params: ModelParams<f64>,
) -> Result<RunOutput<f64>, AppError> {
    let solver = Solver::new(mesh, params, solver_options(cfg))?;
    Ok(solver.run(initial.clone(), &run_spec(cfg))?)
}

/// Writes snapshot CSVs, `diagnostics.csv` and `summary.txt` into `dir`.
pub fn write_run(dir: &Path, mesh: &TriMesh, out: &RunOutput<f64>) -> Result<(), AppError> {
    output::ensure_dir(dir)?;
    for (k, snap) in out.snapshots.iter().enumerate() {
        output::write_snapshot(
            mesh,
            &snap.state,
            &dir.join(snapshot_file_name(k, snap.state.t)),
        )?;
    }
    let diag = format_diagnostics(out.snapshots.iter().map(|s| &s.diagnostics));
    output::write_text(&dir.join("diagnostics.csv"), &diag)?;
    let s = &out.stats;
    let summary = format!(
        "steps = {}\nmax_advective_mass_change = {}\nmin_c = {}\nmin_v = {}\nmax_v = {}\ndt_min = {}\ndt_max = {}\n",
        s.steps,
        fmt_float(s.max_advective_mass_change),
        fmt_float(s.min_c),
        fmt_float(s.min_v),
        fmt_float(s.max_v),
        fmt_float(s.dt_min),
        fmt_float(s.dt_max)
    );
    output::write_text(&dir.join("summary.txt"), &summary)?;
    Ok(())
}

/// `run` subcommand body.
pub fn run_config(cfg: &RunConfig, dir: &Path) -> Result<RunOutput<f64>, AppError> {
    let mesh = build_mesh(cfg)?;
    let initial = initial_state(&mesh, cfg)?;
    let out = simulate(&mesh, &initial, cfg, cfg.model)?;
    write_run(dir, &mesh, &out)?;
    mesh::io::save_mesh(&mesh, &dir.join("mesh.txt"))?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub degenerate: RunOutput<f64>,
    pub nondegenerate: RunOutput<f64>,
    /// Mean `v` of each run's final state.
    pub mean_v: (f64, f64),
}

impl Comparison {
    /// Per-snapshot verdict lines on the support-fraction ordering, then the mean-v line.
    pub fn verdict_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .degenerate
            .snapshots
            .iter()
            .zip(&self.nondegenerate.snapshots)
            .map(|(d, n)| {
                let (sd, sn) = (d.diagnostics.support_fraction_c, n.diagnostics.support_fraction_c);
                format!(
                    "verdict t={}: support_fraction degenerate={sd:.6} nondegenerate={sn:.6} ordering={}",
                    d.requested_t,
                    if sd < sn { "holds" } else { "violated" }
                )
            })
            .collect();
        let (md, mn) = self.mean_v;
        lines.push(format!(
            "verdict final: mean_v degenerate={md:.6} nondegenerate={mn:.6} ordering={}",
            if md >= mn { "holds" } else { "violated" }
        ));
        lines
    }

    pub fn joined_csv(&self) -> String {
        let cols: Vec<&str> = CSV_HEADER.split(',').collect();
        let mut s = String::from("requested_t");
        for prefix in ["degenerate", "nondegenerate"] {
            for c in &cols {
                let _ = write!(s, ",{prefix}_{c}");
            }
        }
        s.push('\n');
        for (d, n) in self
            .degenerate
            .snapshots
            .iter()
            .zip(&self.nondegenerate.snapshots)
        {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_float(d.requested_t),
                output::format_diagnostics_row(&d.diagnostics),
                output::format_diagnostics_row(&n.diagnostics)
            );
        }
        s
    }
}

/// Runs the degenerate and nondegenerate variants on the same mesh and initial data.
pub fn compare(cfg: &RunConfig) -> Result<(TriMesh, Comparison), AppError> {
    let mesh = build_mesh(cfg)?;
    let initial = initial_state(&mesh, cfg)?;
    let deg = cfg.model.with_variant(Variant::Degenerate);
    let non = cfg.model.with_variant(Variant::Nondegenerate);
    let (a, b) = std::thread::scope(|s| {
        let h = s.spawn(|| simulate(&mesh, &initial, cfg, non));
        let a = simulate(&mesh, &initial, cfg, deg);
        (a, h.join().expect("comparison worker panicked"))
    });
    let (degenerate, nondegenerate) = (a?, b?);
    let mean_v = (
        degenerate.final_state.v.mean(&mesh),
        nondegenerate.final_state.v.mean(&mesh),
    );
    Ok((
        mesh,
        Comparison {
            degenerate,
            nondegenerate,
            mean_v,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsRow {
    pub eps: f64,
    pub t: f64,
    pub l1_c: f64,
    pub l1_v: f64,
}

pub const EPS_CSV_HEADER: &str = "eps,t,l1_c,l1_v";

pub fn eps_csv(rows: &[EpsRow]) -> String {
    let mut s = format!("{EPS_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_float(r.eps),
            fmt_float(r.t),
            fmt_float(r.l1_c),
            fmt_float(r.l1_v)
        );
    }
    s
}

/// Regularized runs with `eps1 = eps2 = eps` for each entry of `eps_list`,
/// measured in L1 against the degenerate run at every snapshot.
pub fn eps_study(cfg: &RunConfig, eps_list: &[f64], theta: f64) -> Result<Vec<EpsRow>, AppError> {
    if eps_list.is_empty() {
        return Err(AppError::Usage("empty epsilon list".into()));
    }
    let mesh = build_mesh(cfg)?;
    let initial = initial_state(&mesh, cfg)?;
    let reference = cfg.model.with_variant(Variant::Degenerate);
    let members: Vec<ModelParams<f64>> = eps_list
        .iter()
        .map(|&e| reference.regularized(e, e, theta))
        .collect();
    for p in &members {
        p.validate().map_err(|e| ConfigError::Invalid {
            field: "eps-list".into(),
            reason: e.to_string(),
        })?;
    }
    let (base, runs) = std::thread::scope(|s| {
        let handles: Vec<_> = members
            .iter()
            .map(|&p| {
                let (mesh, initial) = (&mesh, &initial);
                s.spawn(move || simulate(mesh, initial, cfg, p))
            })
            .collect();
        let base = simulate(&mesh, &initial, cfg, reference);
        let runs: Vec<_> = handles
            .into_iter()
            .map(|h| h.join().expect("eps-study worker panicked"))
            .collect();
        (base, runs)
    });
    let base = base?;
    let mut rows = Vec::new();
    for (&eps, run) in eps_list.iter().zip(runs) {
        let run = run?;
        for (a, b) in run.snapshots.iter().zip(&base.snapshots) {
            rows.push(EpsRow {
                eps,
                t: a.requested_t,
                l1_c: a.state.c.l1_distance(&b.state.c, &mesh),
                l1_v: a.state.v.l1_distance(&b.state.v, &mesh),
            });
        }
    }
    Ok(rows)
}
