//! Operator-splitting time stepper.
//!
//! One step advances `(c, v)` in three stages:
//!
//! 1. haptotactic transport of `c` with an upwind (Godunov) edge flux,
//!    producing `c*`;
//! 2. explicit diffusion and reaction of `c*` with the tissue field frozen at
//!    the old level, producing the new `c`;
//! 3. explicit Euler for the tissue ODE using the old `c` and `v` (or, for
//!    the regularized variant, for `psi(v)` with added `eps1`-diffusion).
//!
//! Boundary edges carry no flux. Each stage first evaluates per-edge fluxes
//! in edge order and then accumulates them per cell, so results do not
//! depend on anything but the mesh ordering.

mod flux;
mod run;
mod stencil;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::TriMesh;
use crate::model::{psi, ModelError, ModelParams, Variant};
use crate::scalar::Scalar;
use crate::state::{CellField, SimState, StateViolation};

pub use flux::{godunov_edge_flux, godunov_flux_minmax, upwind_flux};
pub use run::{RunFailure, RunOutput, RunSpec, RunStats, Snapshot, TimeStep};
pub use stencil::{edge_gradient, EdgeStencil, GradientScheme, StencilEdge};

/// Assumed maximum number of edges through which a cell can lose mass.
const DEGREE: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("advective CFL violated on edge {edge}: Courant number {courant:.4} > 1")]
    Cfl { edge: usize, courant: f64 },
    #[error("diffusive stability bound violated on edge {edge}: number {number:.4} > 1")]
    DiffusionStability { edge: usize, number: f64 },
    #[error("reaction positivity bound violated: dt * rate = {number:.4} > 1")]
    ReactionBound { number: f64 },
    #[error("non-finite {field} in cell {cell}")]
    NonFinite { field: &'static str, cell: usize },
    #[error("state invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl From<StateViolation> for SolverError {
    fn from(v: StateViolation) -> Self {
        SolverError::Invariant(v.to_string())
    }
}

/// Rule for combining the two cell values of a coefficient on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeAveraging {
    #[default]
    Arithmetic,
    Harmonic,
}

impl EdgeAveraging {
    #[inline]
    fn combine<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            EdgeAveraging::Arithmetic => (a + b) * T::lit(0.5),
            EdgeAveraging::Harmonic => {
                let s = a + b;
                if s > T::zero() {
                    T::lit(2.0) * a * b / s
                } else {
                    T::zero()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub gradient: GradientScheme,
    /// Averaging of the diffusion coefficient on edges. The haptotactic
    /// sensitivity is always averaged arithmetically.
    pub diffusion_averaging: EdgeAveraging,
    /// Upper limit for adaptive steps.
    pub dt_max: T,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            gradient: GradientScheme::TwoPoint,
            diffusion_averaging: EdgeAveraging::Arithmetic,
            dt_max: T::lit(0.1),
        }
    }
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<T> {
    pub dt: T,
    /// `|mass(c*) - mass(c)| / mass(c)` for the transport stage (0 when the mass is 0).
    pub advective_mass_change: T,
}

/// Stepper bound to one mesh and one parameter set.
#[derive(Debug, Clone)]
pub struct Solver<'m, T> {
    mesh: &'m TriMesh<T>,
    params: ModelParams<T>,
    options: SolverOptions<T>,
    stencil: EdgeStencil<T>,
}

impl<'m, T: Scalar> Solver<'m, T> {
    pub fn new(
        mesh: &'m TriMesh<T>,
        params: ModelParams<T>,
        options: SolverOptions<T>,
    ) -> Result<Self, SolverError> {
        params.validate()?;
        if !(options.dt_max > T::zero()) {
            return Err(SolverError::InvalidInput(format!(
                "dt_max must be positive, got {}",
                options.dt_max
            )));
        }
        let stencil = EdgeStencil::new(mesh, options.gradient);
        Ok(Self {
            mesh,
            params,
            options,
            stencil,
        })
    }

    pub fn mesh(&self) -> &'m TriMesh<T> {
        self.mesh
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn options(&self) -> &SolverOptions<T> {
        &self.options
    }

    pub fn stencil(&self) -> &EdgeStencil<T> {
        &self.stencil
    }

    fn check_lengths(&self, fields: &[&[T]]) -> Result<(), SolverError> {
        let n = self.mesh.n_cells();
        match fields.iter().find(|f| f.len() != n) {
            Some(f) => Err(SolverError::InvalidInput(format!(
                "field of length {} on a mesh with {n} cells",
                f.len()
            ))),
            None => Ok(()),
        }
    }

    fn sensitivities(&self, v: &[T]) -> Result<Vec<T>, SolverError> {
        v.iter()
            .map(|&vi| Ok(self.params.haptotactic_sensitivity(vi)?))
            .collect()
    }

    /// Normal haptotactic speed `a = V . n` on every stencil edge, with
    /// `V = avg(chi) * grad v`.
    fn edge_speeds(&self, v: &[T]) -> Result<Vec<T>, SolverError> {
        let chi = self.sensitivities(v)?;
        let half = T::lit(0.5);
        Ok(self
            .stencil
            .edges()
            .iter()
            .map(|e| {
                let chi_edge = half * (chi[e.left] + chi[e.right]);
                let jump = v[e.right] - v[e.left];
                let vel = [
                    chi_edge * jump * e.grad_factor[0],
                    chi_edge * jump * e.grad_factor[1],
                ];
                vel[0] * e.normal[0] + vel[1] * e.normal[1]
            })
            .collect())
    }

    /// Haptotactic drift on every interior edge, in stencil order.
    pub fn edge_velocities(&self, v: &[T]) -> Result<Vec<[T; 2]>, SolverError> {
        self.check_lengths(&[v])?;
        let chi = self.sensitivities(v)?;
        let half = T::lit(0.5);
        Ok(self
            .stencil
            .edges()
            .iter()
            .map(|e| {
                let chi_edge = half * (chi[e.left] + chi[e.right]);
                let jump = v[e.right] - v[e.left];
                [
                    chi_edge * jump * e.grad_factor[0],
                    chi_edge * jump * e.grad_factor[1],
                ]
            })
            .collect())
    }

    fn edge_diffusivities(&self, c: &[T], v: &[T]) -> Result<Vec<T>, SolverError> {
        let d: Vec<T> = c
            .iter()
            .zip(v)
            .map(|(&ci, &vi)| Ok(self.params.diffusion_coefficient(vi, ci)?))
            .collect::<Result<_, SolverError>>()?;
        let avg = self.options.diffusion_averaging;
        Ok(self
            .stencil
            .edges()
            .iter()
            .map(|e| avg.combine(d[e.left], d[e.right]))
            .collect())
    }

    /// Stage 1: `c -> c*` by upwind transport along the tissue gradient.
    pub fn advection_step(&self, state: &SimState<T>, dt: T) -> Result<CellField<T>, SolverError> {
        self.check_lengths(&[&state.c, &state.v])?;
        let speeds = self.edge_speeds(&state.v)?;
        let deg = T::lit(DEGREE);
        let mut net = vec![T::zero(); self.mesh.n_cells()];
        for (e, &a) in self.stencil.edges().iter().zip(&speeds) {
            let courant = dt * a.abs() * e.length / e.min_area * deg;
            if courant > T::one() {
                return Err(SolverError::Cfl {
                    edge: e.edge,
                    courant: courant.to_f64_lossy(),
                });
            }
            let f = e.length * upwind_flux(a, state.c[e.left], state.c[e.right]);
            net[e.left] = net[e.left] + f;
            net[e.right] = net[e.right] - f;
        }
        let areas = self.mesh.cell_areas();
        let c_star: Vec<T> = state
            .c
            .iter()
            .zip(&net)
            .zip(areas)
            .map(|((&c, &f), &area)| c - dt / area * f)
            .collect();
        if let Some(cell) = c_star.iter().position(|x| !x.is_finite()) {
            return Err(SolverError::NonFinite { field: "c*", cell });
        }
        Ok(c_star.into())
    }

    /// Stage 2: `c* -> c^{k+1}` by explicit diffusion and reaction with `v` frozen.
    pub fn diffusion_reaction_step(
        &self,
        c_star: &[T],
        v: &[T],
        dt: T,
    ) -> Result<CellField<T>, SolverError> {
        self.check_lengths(&[c_star, v])?;
        let d_edge = self.edge_diffusivities(c_star, v)?;
        let deg = T::lit(DEGREE);
        let mut net = vec![T::zero(); self.mesh.n_cells()];
        for (e, &d) in self.stencil.edges().iter().zip(&d_edge) {
            let number =
                dt * d * e.transmissibility.abs().max(e.dist.recip()) * e.length / e.min_area * deg;
            if number > T::one() {
                return Err(SolverError::DiffusionStability {
                    edge: e.edge,
                    number: number.to_f64_lossy(),
                });
            }
            // Flux into `left` from `right`.
            let f = e.length * d * e.transmissibility * (c_star[e.right] - c_star[e.left]);
            net[e.left] = net[e.left] + f;
            net[e.right] = net[e.right] - f;
        }
        let areas = self.mesh.cell_areas();
        let mut out = Vec::with_capacity(c_star.len());
        for i in 0..c_star.len() {
            let r = self.params.reaction_c(c_star[i], v[i])?;
            let next = c_star[i] + dt / areas[i] * net[i] + dt * r;
            if !next.is_finite() {
                return Err(SolverError::NonFinite {
                    field: "c",
                    cell: i,
                });
            }
            out.push(next);
        }
        Ok(out.into())
    }

    /// Stage 3: tissue update from the old `(c, v)`.
    pub fn ode_step_v(&self, state: &SimState<T>, dt: T) -> Result<CellField<T>, SolverError> {
        self.check_lengths(&[&state.c, &state.v])?;
        let c_max = state.c.max().max(T::zero());
        let number = dt * (self.params.lambda_ * c_max + self.params.mu_v);
        if number > T::one() {
            return Err(SolverError::ReactionBound {
                number: number.to_f64_lossy(),
            });
        }
        let out: Vec<T> = if self.params.variant == Variant::Regularized {
            self.regularized_v_step(state, dt)?
        } else {
            state
                .c
                .iter()
                .zip(state.v.iter())
                .map(|(&c, &v)| Ok(v + dt * self.params.reaction_v(c, v)?))
                .collect::<Result<_, SolverError>>()?
        };
        if let Some(cell) = out.iter().position(|x| !x.is_finite()) {
            return Err(SolverError::NonFinite { field: "v", cell });
        }
        Ok(out.into())
    }

    /// `psi(v)` advanced with `eps1`-diffusion plus the transformed source, then inverted.
    fn regularized_v_step(&self, state: &SimState<T>, dt: T) -> Result<Vec<T>, SolverError> {
        let eps1 = self.params.eps1();
        let p: Vec<T> = state.v.iter().map(|&v| psi(v)).collect::<Result<_, _>>()?;
        let deg = T::lit(DEGREE);
        let mut net = vec![T::zero(); p.len()];
        for e in self.stencil.edges() {
            let number = dt * eps1 * e.transmissibility.abs().max(e.dist.recip()) * e.length
                / e.min_area
                * deg;
            if number > T::one() {
                return Err(SolverError::DiffusionStability {
                    edge: e.edge,
                    number: number.to_f64_lossy(),
                });
            }
            let f = e.length * eps1 * e.transmissibility * (p[e.right] - p[e.left]);
            net[e.left] = net[e.left] + f;
            net[e.right] = net[e.right] - f;
        }
        let areas = self.mesh.cell_areas();
        (0..p.len())
            .map(|i| {
                let s = self.params.psi_source(state.c[i], state.v[i])?;
                Ok(crate::model::psi_inverse(
                    p[i] + dt / areas[i] * net[i] + dt * s,
                ))
            })
            .collect()
    }

    /// Largest stable step, capped at `dt_max`.
    ///
    /// The step satisfies, each scaled by `cfl_safety`: the advective CFL
    /// bound `dt |a| |e| / min(area) * 3 <= 1`, the diffusive bound
    /// `dt D_e |e| / (dist * min(area)) * 3 <= 1`, and the reaction bound
    /// `dt (mu_c (1 + eta + max c) + lambda max c + mu_v) <= 1`.
    pub fn compute_dt(&self, state: &SimState<T>, cfl_safety: T) -> Result<T, SolverError> {
        if !(cfl_safety > T::zero() && cfl_safety <= T::one()) {
            return Err(SolverError::InvalidInput(format!(
                "cfl_safety {cfl_safety} outside (0, 1]"
            )));
        }
        self.check_lengths(&[&state.c, &state.v])?;
        if let Some(cell) = state.c.first_non_finite() {
            return Err(SolverError::NonFinite { field: "c", cell });
        }
        if let Some(cell) = state.v.first_non_finite() {
            return Err(SolverError::NonFinite { field: "v", cell });
        }
        let deg = T::lit(DEGREE);
        let speeds = self.edge_speeds(&state.v)?;
        let d_edge = self.edge_diffusivities(&state.c, &state.v)?;
        let eps1 = self.params.eps1();
        let mut rate = T::zero();
        for ((e, &a), &d) in self.stencil.edges().iter().zip(&speeds).zip(&d_edge) {
            let geo = e.length / e.min_area * deg;
            let transmissibility = e.transmissibility.abs().max(e.dist.recip());
            rate = rate
                .max(a.abs() * geo)
                .max(d.max(eps1) * transmissibility * geo);
        }
        let p = &self.params;
        let c_max = state.c.max().max(T::zero());
        let reaction = p.mu_c * (T::one() + p.eta + c_max)
            + p.lambda_ * c_max
            + p.mu_v
            + p.sink_rate_bound(c_max);
        rate = rate.max(reaction);
        if rate > T::zero() {
            Ok(self.options.dt_max.min(cfl_safety / rate))
        } else {
            Ok(self.options.dt_max)
        }
    }

    /// One full splitting step. The returned state satisfies the state invariants.
    pub fn step(
        &self,
        state: &SimState<T>,
        dt: T,
    ) -> Result<(SimState<T>, StepReport<T>), SolverError> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(SolverError::InvalidInput(format!(
                "time step {dt} must be positive"
            )));
        }
        let c_star = self.advection_step(state, dt)?;
        let mass_before = state.c.integral(self.mesh);
        let mass_after = c_star.integral(self.mesh);
        let advective_mass_change = if mass_before > T::zero() {
            (mass_after - mass_before).abs() / mass_before
        } else {
            mass_after.abs()
        };
        let c_next = self.diffusion_reaction_step(&c_star, &state.v, dt)?;
        let v_next = self.ode_step_v(state, dt)?;
        let mut next = SimState::new(state.t + dt, c_next, v_next);
        next.enforce_invariants(self.mesh.n_cells())?;
        Ok((
            next,
            StepReport {
                dt,
                advective_mass_change,
            },
        ))
    }
}

#[cfg(test)]
mod tests;
