//! Adaptive time integration to a steady state, blow-up, or the horizon.

use crate::eigenbasis::{project, Mode};
use crate::grid::Grid;
use crate::model::ModelParams;

use super::{step_bound, FieldState, Simulation, SolverError};

/// Steps this small count as collapse of the step-size controller.
const MIN_DT: f64 = 1e-10;
/// Confirmations needed before declaring convergence.
const CONFIRMATIONS: usize = 3;
/// Regular steps between damping cycles on 2D grids.
const CYCLE_EVERY: u64 = 8;
/// Ratio between consecutive substeps of a damping cycle.
const CYCLE_RATIO: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunControls {
    /// Upper bound on the step; also capped at `0.1 / (mu ubar + alpha)`.
    pub dt_max: f64,
    pub t_max: f64,
    /// Steady tolerance on both the max-norm rate and the residual.
    pub tol_ss: f64,
    pub blow_up_cap: f64,
    /// Monitor sampling interval in time units.
    pub sample_every: f64,
    /// Largest accepted relative change of either field per step.
    pub max_change: f64,
    /// Modes whose energy is reported at the end of the run.
    pub energy_modes: Vec<Mode>,
}

impl RunControls {
    /// Defaults: `tol_ss = 1e-8`, cap `1e6 ubar`, samples every 0.1.
    pub fn new(p: &ModelParams, t_max: f64) -> Self {
        RunControls {
            dt_max: 0.1,
            t_max,
            tol_ss: 1e-8,
            blow_up_cap: 1e6 * p.ubar(),
            sample_every: 0.1,
            max_change: 0.05,
            energy_modes: Vec::new(),
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        let checks = [
            ("dt_max", self.dt_max),
            ("t_max", self.t_max),
            ("tol_ss", self.tol_ss),
            ("blow_up_cap", self.blow_up_cap),
            ("sample_every", self.sample_every),
            ("max_change", self.max_change),
        ];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SolverError::BadControl { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlowUpReason {
    Cap { max_u: f64 },
    NonFinite,
    StepCollapse { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Converged,
    BlowUp(BlowUpReason),
    MaxSteps,
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::BlowUp(_) => "blow_up",
            Outcome::MaxSteps => "max_steps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSample {
    pub t: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    pub residual: f64,
    /// `max(|du|, |dv|) / dt` of the latest step.
    pub rate: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalEnergy {
    pub mode: Mode,
    pub coefficient: f64,
    /// `coefficient^2 / sum over nonzero modes`, or 0 for a flat field.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outcome: Outcome,
    pub final_state: FieldState,
    pub t_end: f64,
    pub monitors: Vec<MonitorSample>,
    pub modal_energies: Vec<ModalEnergy>,
    /// Energy of `u - mean(u)`; equals the sum over all nonzero discrete modes.
    pub nonzero_energy: f64,
    pub steps: u64,
    pub rejected: u64,
}

impl RunReport {
    pub fn final_residual(&self) -> f64 {
        self.monitors.last().map_or(f64::NAN, |m| m.residual)
    }
}

impl Simulation {
    /// Integrates until convergence, blow-up or `t_max`.
    pub fn run(&mut self, controls: &RunControls) -> Result<RunReport, SolverError> {
        self.run_observed(controls, &[], |_| {})
    }

    /// Like [`Simulation::run`], landing exactly on each of `stops` (sorted,
    /// within the horizon) and handing the state to `observer` there.
    pub fn run_observed(
        &mut self,
        controls: &RunControls,
        stops: &[f64],
        mut observer: impl FnMut(&FieldState),
    ) -> Result<RunReport, SolverError> {
        controls.validate()?;
        let p = self.params;
        let grid = self.grid;
        let (ubar, vbar) = p.homogeneous_state();
        let dt_cap = controls.dt_max.min(0.1 * step_bound(&p));
        let t0 = self.state.t;
        let t_end = t0 + controls.t_max;
        let mut stops: Vec<f64> = stops.iter().copied().filter(|&s| s >= t0 && s <= t_end).collect();
        stops.sort_by(f64::total_cmp);
        let mut next_stop = 0;
        while next_stop < stops.len() && stops[next_stop] <= t0 {
            observer(&self.state);
            next_stop += 1;
        }

        let mut dt = dt_cap / 16.0;
        let mut monitors = vec![self.sample(&grid, 0.0, 0.0)];
        let mut next_sample = t0 + controls.sample_every;
        let mut confirmations = 0;
        let mut rejected = 0;
        let mut last_rate = f64::INFINITY;
        let steps0 = self.state.step_count;
        let mut regular = 0u64;
        let mut cycle: Vec<f64> = Vec::new();

        let outcome = loop {
            let target = stops.get(next_stop).copied().unwrap_or(t_end).min(t_end);
            let remaining = target - self.state.t;
            let planned = cycle.last().copied().unwrap_or(dt);
            let substep = !cycle.is_empty();
            let landing = remaining <= planned * (1.0 + 1e-12);
            let h = if landing { remaining } else { planned };
            if substep {
                cycle.pop();
            }

            if h > 0.0 {
                let trial = self.trial(h);
                let rel = (trial.max_du / max_abs_or(&self.state.u, ubar))
                    .max(trial.max_dv / max_abs_or(&self.state.v, vbar));
                if !trial.finite || rel > controls.max_change {
                    rejected += 1;
                    if substep {
                        cycle.clear();
                        continue;
                    }
                    dt = 0.5 * h;
                    if dt < MIN_DT {
                        break Outcome::BlowUp(if trial.finite {
                            BlowUpReason::StepCollapse { dt }
                        } else {
                            BlowUpReason::NonFinite
                        });
                    }
                    continue;
                }
                self.commit(&trial);
                if landing {
                    self.state.t = target;
                }
                last_rate = trial.max_du.max(trial.max_dv) / h;
                if !landing && !substep {
                    let grow = if rel > 0.0 { (0.9 * controls.max_change / rel).min(1.5) } else { 1.5 };
                    dt = (h * grow).min(dt_cap);
                }
                if !substep {
                    regular += 1;
                    if grid.is_2d() && regular.is_multiple_of(CYCLE_EVERY) {
                        cycle = damping_cycle(&p, &grid, dt);
                    }
                }
                if !self.state.is_finite() {
                    break Outcome::BlowUp(BlowUpReason::NonFinite);
                }
                let max_u = self.state.max_u();
                if max_u > controls.blow_up_cap {
                    break Outcome::BlowUp(BlowUpReason::Cap { max_u });
                }
            }

            if landing && next_stop < stops.len() && target == stops[next_stop] {
                observer(&self.state);
                next_stop += 1;
            }

            if self.state.t >= next_sample || self.state.t >= t_end {
                let s = self.sample(&grid, last_rate, h);
                let steady = s.rate < controls.tol_ss && s.residual < controls.tol_ss;
                monitors.push(s);
                next_sample = self.state.t + controls.sample_every;
                confirmations = if steady { confirmations + 1 } else { 0 };
                if confirmations >= CONFIRMATIONS {
                    break Outcome::Converged;
                }
            }
            if self.state.t >= t_end {
                break Outcome::MaxSteps;
            }
        };

        if monitors.last().map(|m| m.t) != Some(self.state.t) && self.state.is_finite() {
            monitors.push(self.sample(&grid, last_rate, dt));
        }
        while next_stop < stops.len() {
            // stops past an early termination see the terminal state
            observer(&self.state);
            next_stop += 1;
        }
        let (modal_energies, nonzero_energy) = modal_energies(&grid, &self.state.u, &controls.energy_modes);
        Ok(RunReport {
            outcome,
            final_state: self.state.clone(),
            t_end: self.state.t,
            monitors,
            modal_energies,
            nonzero_energy,
            steps: self.state.step_count - steps0,
            rejected,
        })
    }

    fn sample(&self, grid: &Grid, rate: f64, dt: f64) -> MonitorSample {
        let s = &self.state;
        MonitorSample {
            t: s.t,
            min_u: s.min_u(),
            max_u: s.max_u(),
            mass_u: grid.integrate(&s.u),
            mass_v: grid.integrate(&s.v),
            residual: self.residual(),
            rate,
            dt,
        }
    }
}

/// Substeps `dt / 4, dt / 16, ...` down to the inverse of the largest
/// diffusive eigenvalue, stored smallest first so they pop largest first.
///
/// The factored step damps a mode that is stiff along both axes by only
/// about `1 - 2 / (dt lambda)` when `dt lambda` is large, so checkerboard
/// errors linger at long steps. A step with `dt lambda` near 1 along each
/// axis damps them by at least half, and the geometric ladder reaches every
/// such mode once per cycle.
fn damping_cycle(p: &ModelParams, grid: &Grid, dt: f64) -> Vec<f64> {
    let lam = 4.0 * p.d1().max(p.d2()) / (grid.min_spacing() * grid.min_spacing());
    let mut out = Vec::new();
    let mut h = dt / CYCLE_RATIO;
    while h * lam > 0.5 {
        out.push(h);
        h /= CYCLE_RATIO;
    }
    out.reverse();
    out
}

fn max_abs_or(f: &[f64], floor: f64) -> f64 {
    crate::linalg::max_abs(f).max(floor.abs())
}

/// Coefficients of `u` on `modes` and their share of the energy of
/// `u - mean(u)`.
pub(crate) fn modal_energies(grid: &Grid, u: &[f64], modes: &[Mode]) -> (Vec<ModalEnergy>, f64) {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    let total: f64 = u.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * grid.cell_volume();
    let out = modes
        .iter()
        .filter_map(|m| {
            let c = project(u, grid, m).ok()?;
            Some(ModalEnergy {
                mode: *m,
                coefficient: c,
                fraction: if total > 0.0 { c * c / total } else { 0.0 },
            })
        })
        .collect();
    (out, total)
}

/// Runs `initial` to completion.
pub fn run(
    initial: FieldState,
    p: &ModelParams,
    grid: &Grid,
    controls: &RunControls,
) -> Result<RunReport, SolverError> {
    Simulation::new(*p, *grid, initial)?.run(controls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{sample_mode, Domain, Mode};

    #[test]
    fn diffusion_relaxes_to_rest() {
        let p = ModelParams::unit(0.0);
        let d = Domain::interval(std::f64::consts::PI).unwrap();
        let g = Grid::uniform(d, 64).unwrap();
        let m = Mode::new(d, 1, 0).unwrap();
        let phi = sample_mode(&g, &m).unwrap();
        let u = phi.iter().map(|x| 1.0 + 0.5 * x).collect();
        let mut c = RunControls::new(&p, 100.0);
        c.energy_modes = vec![m];
        let r = run(FieldState::new(u, vec![1.0; g.len()]), &p, &g, &c).unwrap();
        assert_eq!(r.outcome, Outcome::Converged);
        assert!(r.final_state.sup_deviation(&p) < 1e-6);
        assert!(r.final_residual() < 1e-8);
    }

    #[test]
    fn lands_on_stop_times() {
        let p = ModelParams::unit(0.0);
        let g = Grid::uniform(Domain::interval(1.0).unwrap(), 16).unwrap();
        let u = g.sample(|x, _| 1.0 + 0.1 * (std::f64::consts::PI * x).cos());
        let mut sim = Simulation::new(p, g, FieldState::new(u, vec![1.0; 16])).unwrap();
        let mut seen = Vec::new();
        let c = RunControls::new(&p, 2.0);
        sim.run_observed(&c, &[0.0, 0.37, 1.5], |s| seen.push(s.t)).unwrap();
        assert_eq!(seen, vec![0.0, 0.37, 1.5]);
    }

    #[test]
    fn rejects_bad_controls() {
        let p = ModelParams::unit(0.0);
        let g = Grid::uniform(Domain::interval(1.0).unwrap(), 16).unwrap();
        let mut c = RunControls::new(&p, 1.0);
        c.tol_ss = 0.0;
        let err = run(FieldState::homogeneous(&p, &g), &p, &g, &c).unwrap_err();
        assert!(matches!(err, SolverError::BadControl { name: "tol_ss", .. }));
    }
}
