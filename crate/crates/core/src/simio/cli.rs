//! Command-line interface.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::load_config;
use super::experiments::{self, eps_csv, AppError};
use super::output;
use crate::mesh::{self, DistMeshOptions};

#[derive(Debug, Parser)]
#[command(
    name = "haptofv",
    version,
    about = "Finite-volume haptotaxis simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write snapshots and diagnostics.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the degenerate and nondegenerate variants side by side.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regularized runs over a list of epsilons, compared with the degenerate run.
    EpsStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 5.0)]
        theta: f64,
        /// Overrides the config's final time (snapshots past it are dropped).
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
}

#[derive(Debug, Subcommand)]
enum MeshCommand {
    /// Generate a unit-square mesh file.
    Gen(MeshGen),
}

#[derive(Debug, Args)]
struct MeshGen {
    #[arg(long)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
}

/// Parses `argv` and executes; returns the process exit code.
pub fn cli_main<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "error: kind={} message={}",
                e.kind(),
                e.to_string().replace('\n', " ")
            );
            1
        }
    }
}

fn execute(command: Command) -> Result<(), AppError> {
    match command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let dir = cfg.output_dir(out.as_deref());
            let result = experiments::run_config(&cfg, &dir)?;
            println!(
                "run complete: {} steps, {} snapshots written to {}",
                result.stats.steps,
                result.snapshots.len(),
                dir.display()
            );
        }
        Command::Compare { config, out } => {
            let cfg = load_config(&config)?;
            let dir = cfg.output_dir(out.as_deref());
            let (_, cmp) = experiments::compare(&cfg)?;
            output::ensure_dir(&dir)?;
            output::write_text(&dir.join("compare_diagnostics.csv"), &cmp.joined_csv())?;
            let lines = cmp.verdict_lines();
            output::write_text(&dir.join("verdict.txt"), &(lines.join("\n") + "\n"))?;
            for l in lines {
                println!("{l}");
            }
        }
        Command::EpsStudy {
            config,
            eps_list,
            theta,
            t_end,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(t) = t_end {
                cfg.time.t_end = t;
                cfg.time.snapshot_times.retain(|&s| s <= t);
                if cfg.time.snapshot_times.last() != Some(&t) {
                    cfg.time.snapshot_times.push(t);
                }
                cfg.validate()?;
            }
            let dir = cfg.output_dir(out.as_deref());
            let rows = experiments::eps_study(&cfg, &eps_list, theta)?;
            output::ensure_dir(&dir)?;
            output::write_text(&dir.join("eps_study.csv"), &eps_csv(&rows))?;
            let final_t = cfg.time.t_end;
            let at_end: Vec<_> = rows.iter().filter(|r| r.t == final_t).collect();
            for r in &at_end {
                println!(
                    "eps={} t={} l1_c={:.6e} l1_v={:.6e}",
                    r.eps, r.t, r.l1_c, r.l1_v
                );
            }
            let smallest = at_end.iter().min_by(|a, b| a.eps.total_cmp(&b.eps));
            let largest = at_end.iter().max_by(|a, b| a.eps.total_cmp(&b.eps));
            if let (Some(s), Some(l)) = (smallest, largest) {
                let monotone = {
                    let mut sorted = at_end.clone();
                    sorted.sort_by(|a, b| a.eps.total_cmp(&b.eps));
                    sorted.windows(2).all(|w| w[0].l1_c <= w[1].l1_c)
                };
                println!(
                    "verdict: l1_c(eps={}) <= l1_c(eps={}): {}; fully monotone: {}",
                    s.eps,
                    l.eps,
                    s.l1_c <= l.l1_c,
                    monotone
                );
            }
        }
        Command::Mesh {
            command: MeshCommand::Gen(g),
        } => {
            let opts = DistMeshOptions {
                seed: g.seed,
                ..Default::default()
            };
            let m = mesh::generate_unit_square_mesh(g.h, g.iters, &opts)?;
            if let Some(dir) = g.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                output::ensure_dir(dir)?;
            }
            mesh::io::save_mesh(&m, &g.out)?;
            println!(
                "mesh: {} vertices, {} cells, min quality {:.3}",
                m.n_vertices(),
                m.n_cells(),
                m.min_quality()
            );
        }
    }
    Ok(())
}
