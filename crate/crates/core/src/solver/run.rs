//! Time integration to a final time with snapshots.

use super::{Solver, SolverError, StepReport};
use crate::diagnostics::{self, DiagnosticsConfig, DiagnosticsRecord};
use crate::scalar::Scalar;
use crate::state::SimState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep<T> {
    /// Re-evaluate [`Solver::compute_dt`] before every step.
    Adaptive { cfl_safety: T },
    /// Constant step; still refused if it breaks a stability bound.
    Fixed { dt: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec<T> {
    pub t_end: T,
    /// Sorted; each is captured at the first step reaching it.
    pub snapshot_times: Vec<T>,
    pub time_step: TimeStep<T>,
    pub diagnostics: DiagnosticsConfig<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub requested_t: T,
    pub state: SimState<T>,
    pub diagnostics: DiagnosticsRecord<T>,
}

/// Extremes observed over every step of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats<T> {
    pub steps: usize,
    pub max_advective_mass_change: T,
    pub min_c: T,
    pub min_v: T,
    pub max_v: T,
    pub dt_min: T,
    pub dt_max: T,
}

impl<T: Scalar> RunStats<T> {
    fn new(initial: &SimState<T>) -> Self {
        Self {
            steps: 0,
            max_advective_mass_change: T::zero(),
            min_c: initial.c.min(),
            min_v: initial.v.min(),
            max_v: initial.v.max(),
            dt_min: T::infinity(),
            dt_max: T::zero(),
        }
    }

    fn observe(&mut self, state: &SimState<T>, report: &StepReport<T>) {
        self.steps += 1;
        self.max_advective_mass_change = self
            .max_advective_mass_change
            .max(report.advective_mass_change);
        self.min_c = self.min_c.min(state.c.min());
        self.min_v = self.min_v.min(state.v.min());
        self.max_v = self.max_v.max(state.v.max());
        self.dt_min = self.dt_min.min(report.dt);
        self.dt_max = self.dt_max.max(report.dt);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    pub snapshots: Vec<Snapshot<T>>,
    pub stats: RunStats<T>,
    pub final_state: SimState<T>,
}

/// A run aborted by a step error, with everything computed before it.
#[derive(Debug, Clone)]
pub struct RunFailure<T> {
    pub error: SolverError,
    pub last_state: SimState<T>,
    pub partial: RunOutput<T>,
}

impl<T: Scalar> std::fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run aborted at t = {} after {} steps: {}",
            self.last_state.t, self.partial.stats.steps, self.error
        )
    }
}

impl<T: Scalar> std::error::Error for RunFailure<T> {}

impl<T: Scalar> Solver<'_, T> {
    /// Integrates from `initial` to `spec.t_end`.
    ///
    /// The last step is shortened to land on `t_end`. Requested snapshot
    /// times at or before the initial time capture the initial state; an
    /// empty request list yields one snapshot of the final state.
    pub fn run(
        &self,
        initial: SimState<T>,
        spec: &RunSpec<T>,
    ) -> Result<RunOutput<T>, Box<RunFailure<T>>> {
        self.run_with(initial, spec, |_, _| {})
    }

    /// [`Solver::run`] with a callback after every accepted step.
    pub fn run_with<F>(
        &self,
        initial: SimState<T>,
        spec: &RunSpec<T>,
        mut on_step: F,
    ) -> Result<RunOutput<T>, Box<RunFailure<T>>>
    where
        F: FnMut(&SimState<T>, &StepReport<T>),
    {
        let mut state = initial;
        let mut stats = RunStats::new(&state);
        let mut snapshots = Vec::new();
        let fail = |error: SolverError,
                    state: SimState<T>,
                    snapshots: Vec<Snapshot<T>>,
                    stats: RunStats<T>| {
            Box::new(RunFailure {
                error,
                last_state: state.clone(),
                partial: RunOutput {
                    snapshots,
                    stats,
                    final_state: state,
                },
            })
        };

        if let Err(e) = self.validate_run(&mut state, spec) {
            return Err(fail(e, state, snapshots, stats));
        }
        let v0 = state.v.clone();
        let mut requested: Vec<T> = spec.snapshot_times.clone();
        if requested.is_empty() {
            requested.push(spec.t_end);
        }
        let mut next_snap = 0;
        let take =
            |state: &SimState<T>, snapshots: &mut Vec<Snapshot<T>>, next_snap: &mut usize| {
                while *next_snap < requested.len() && state.t >= requested[*next_snap] {
                    snapshots.push(Snapshot {
                        requested_t: requested[*next_snap],
                        state: state.clone(),
                        diagnostics: diagnostics::record(
                            self.mesh,
                            &self.stencil,
                            state,
                            &v0,
                            &spec.diagnostics,
                        ),
                    });
                    *next_snap += 1;
                }
            };
        take(&state, &mut snapshots, &mut next_snap);

        while state.t < spec.t_end {
            let dt = match spec.time_step {
                TimeStep::Adaptive { cfl_safety } => match self.compute_dt(&state, cfl_safety) {
                    Ok(dt) => dt,
                    Err(e) => return Err(fail(e, state, snapshots, stats)),
                },
                TimeStep::Fixed { dt } => dt,
            };
            let remaining = spec.t_end - state.t;
            // Avoid a sliver step from accumulated roundoff in t.
            let dt = if dt >= remaining * T::lit(1.0 - 1e-9) {
                remaining
            } else {
                dt
            };
            match self.step(&state, dt) {
                Ok((mut next, report)) => {
                    if dt == remaining {
                        next.t = spec.t_end;
                    }
                    stats.observe(&next, &report);
                    on_step(&next, &report);
                    state = next;
                    take(&state, &mut snapshots, &mut next_snap);
                }
                Err(e) => return Err(fail(e, state, snapshots, stats)),
            }
        }
        Ok(RunOutput {
            snapshots,
            stats,
            final_state: state,
        })
    }

    fn validate_run(&self, state: &mut SimState<T>, spec: &RunSpec<T>) -> Result<(), SolverError> {
        state.enforce_invariants(self.mesh.n_cells())?;
        if !(spec.t_end >= state.t) {
            return Err(SolverError::InvalidInput(format!(
                "t_end {} precedes initial time {}",
                spec.t_end, state.t
            )));
        }
        if spec.snapshot_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(SolverError::InvalidInput(
                "snapshot times must be sorted".into(),
            ));
        }
        if spec.snapshot_times.last().is_some_and(|&t| t > spec.t_end) {
            return Err(SolverError::InvalidInput(
                "snapshot time beyond t_end".into(),
            ));
        }
        match spec.time_step {
            TimeStep::Adaptive { cfl_safety }
                if !(cfl_safety > T::zero() && cfl_safety <= T::one()) =>
            {
                Err(SolverError::InvalidInput(format!(
                    "cfl_safety {cfl_safety} outside (0, 1]"
                )))
            }
            TimeStep::Fixed { dt } if !(dt > T::zero()) => Err(SolverError::InvalidInput(format!(
                "fixed dt {dt} must be positive"
            ))),
            _ => Ok(()),
        }
    }
}
