//! Finite-difference time integration of the chemotaxis system on
//! cell-centred grids with zero-flux boundaries.
//!
//! Space: second-order central differences in conservative flux form, with
//! the sensitivity evaluated from arithmetic face averages. Time: a
//! linearly implicit Euler step in increment form, factored into x and y
//! tridiagonal sweeps. The chemical is advanced first; the density step then
//! uses the updated chemical and treats diffusion, the linearized
//! chemotactic flux and the linearized growth term implicitly.

mod growth;
mod operators;
mod run;
mod spectrum;
mod sweep;

use thiserror::Error;

pub use crate::grid::Grid;
pub use growth::{measure_growth, GrowthError, GrowthFit};
pub use operators::{laplacian, residual_u, residual_v, steady_residual};
pub use run::{run, BlowUpReason, ModalEnergy, MonitorSample, Outcome, RunControls, RunReport};
pub use spectrum::CosineSpectrum;

use crate::model::ModelParams;
use sweep::Workspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("time step {dt} exceeds the stability bound {bound} = 1 / (mu ubar + alpha)")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("time step must be positive and finite (got {0})")]
    BadStep(f64),
    #[error("state has {got} cells but the grid has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("nonfinite value produced at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid run control {name} = {value}")]
    BadControl { name: &'static str, value: f64 },
}

/// Cell values of both species at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    pub step_count: u64,
}

impl FieldState {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        FieldState { u, v, t: 0.0, step_count: 0 }
    }

    /// The homogeneous steady state on `grid`.
    pub fn homogeneous(p: &ModelParams, grid: &Grid) -> Self {
        let (ub, vb) = p.homogeneous_state();
        Self::new(vec![ub; grid.len()], vec![vb; grid.len()])
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    pub fn max_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from `(ubar, vbar)` over all cells and both species.
    pub fn sup_deviation(&self, p: &ModelParams) -> f64 {
        let (ub, vb) = p.homogeneous_state();
        let du = self.u.iter().fold(0.0f64, |m, x| m.max((x - ub).abs()));
        let dv = self.v.iter().fold(0.0f64, |m, x| m.max((x - vb).abs()));
        du.max(dv)
    }
}

/// Largest step accepted by [`Simulation::step`].
pub fn step_bound(p: &ModelParams) -> f64 {
    1.0 / (p.mu() * p.ubar() + p.alpha())
}

/// A single simulation instance: owns its state and scratch memory.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: ModelParams,
    grid: Grid,
    state: FieldState,
    ws: Workspace,
}

/// Outcome of a trial step held in the workspace until committed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Trial {
    pub dt: f64,
    pub finite: bool,
    pub max_du: f64,
    pub max_dv: f64,
}

impl Simulation {
    pub fn new(params: ModelParams, grid: Grid, state: FieldState) -> Result<Self, SolverError> {
        for f in [&state.u, &state.v] {
            if f.len() != grid.len() {
                return Err(SolverError::ShapeMismatch {
                    expected: grid.len(),
                    got: f.len(),
                });
            }
        }
        Ok(Simulation {
            ws: Workspace::new(&grid),
            params,
            grid,
            state,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn state(&self) -> &FieldState {
        &self.state
    }
    pub fn into_state(self) -> FieldState {
        self.state
    }

    /// Advances one step of size `dt`.
    ///
    /// Only the reaction bound is enforced; nothing limits the change per
    /// step, so strong taxis on a coarse grid can overshoot into negative
    /// densities. [`run`] adapts the step to keep changes small.
    pub fn step(&mut self, dt: f64) -> Result<(), SolverError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::BadStep(dt));
        }
        let bound = step_bound(&self.params);
        if dt > bound {
            return Err(SolverError::StepTooLarge { dt, bound });
        }
        let trial = self.trial(dt);
        if !trial.finite {
            return Err(SolverError::NonFinite { t: self.state.t + dt });
        }
        self.commit(&trial);
        Ok(())
    }

    pub(crate) fn trial(&mut self, dt: f64) -> Trial {
        self.ws
            .increments(&self.params, &self.grid, &self.state.u, &self.state.v, dt)
    }

    pub(crate) fn commit(&mut self, trial: &Trial) {
        for (x, d) in self.state.u.iter_mut().zip(&self.ws.du) {
            *x += d;
        }
        for (x, d) in self.state.v.iter_mut().zip(&self.ws.dv) {
            *x += d;
        }
        self.state.t += trial.dt;
        self.state.step_count += 1;
    }

    /// Steady residual of the current state.
    pub fn residual(&self) -> f64 {
        steady_residual(&self.state, &self.params, &self.grid)
    }
}

/// Functional form of one step.
pub fn step(state: FieldState, p: &ModelParams, grid: &Grid, dt: f64) -> Result<FieldState, SolverError> {
    let mut sim = Simulation::new(*p, *grid, state)?;
    sim.step(dt)?;
    Ok(sim.into_state())
}
