//! Empirical dispersion: fitted exponential rate of a seeded mode.

use thiserror::Error;

use crate::bifurcation::linearize;
use crate::eigenbasis::{project, sample_mode, EigenError, Mode};
use crate::grid::Grid;
use crate::model::{ModelError, ModelParams};

use super::{FieldState, Simulation, SolverError};

/// Fewest samples accepted for a fit.
pub const MIN_SAMPLES: usize = 10;
/// Largest time step used by the fit.
const FIT_DT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("seed amplitude {eps} exceeds 1e-3 * ubar = {limit}")]
    SeedTooLarge { eps: f64, limit: f64 },
    #[error("window {0} must be positive and finite")]
    BadWindow(f64),
    #[error("only {samples} samples before leaving the linear regime (need {MIN_SAMPLES})")]
    InsufficientWindow { samples: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    /// `(t, coefficient of u - ubar)` pairs used in the fit.
    pub samples: Vec<(f64, f64)>,
    pub dt: f64,
}

/// Seeds `mode` with u-amplitude `eps` along the leading eigenvector of the
/// linearization, integrates at `chi`, and fits the slope of the log modal
/// coefficient of `u - ubar` while it stays below `1e-2 ubar`.
pub fn measure_growth(
    p: &ModelParams,
    grid: &Grid,
    mode: &Mode,
    chi: f64,
    eps: f64,
    window: f64,
) -> Result<GrowthFit, GrowthError> {
    let limit = 1e-3 * p.ubar();
    if eps.abs() > limit {
        return Err(GrowthError::SeedTooLarge { eps, limit });
    }
    if !(window > 0.0 && window.is_finite()) {
        return Err(GrowthError::BadWindow(window));
    }
    let p = p.with_chi(chi)?;
    let (ubar, vbar) = p.homogeneous_state();
    let phi = sample_mode(grid, mode)?;
    let v_amp = match linearize(&p, mode).dominant_ratio() {
        Some(r) if r != 0.0 => eps / r,
        _ => 0.0,
    };
    let u = phi.iter().map(|x| ubar + eps * x).collect();
    let v = phi.iter().map(|x| vbar + v_amp * x).collect();
    let mut sim = Simulation::new(p, *grid, FieldState::new(u, v))?;

    let steps = ((window / FIT_DT).ceil() as usize).max(4 * MIN_SAMPLES);
    let dt = window / steps as f64;
    let ceiling = 1e-2 * ubar / mode.norm_const();
    let mut dev = vec![0.0; grid.len()];
    let mut coefficient = |s: &FieldState| -> Result<f64, EigenError> {
        for (d, x) in dev.iter_mut().zip(&s.u) {
            *d = x - ubar;
        }
        project(&dev, grid, mode)
    };
    let mut samples = vec![(0.0, coefficient(sim.state())?)];
    for _ in 0..steps {
        sim.step(dt)?;
        let c = coefficient(sim.state())?;
        if c.abs() > ceiling || c == 0.0 {
            break;
        }
        samples.push((sim.state().t, c));
    }
    if samples.len() < MIN_SAMPLES {
        return Err(GrowthError::InsufficientWindow { samples: samples.len() });
    }
    Ok(GrowthFit {
        rate: log_slope(&samples),
        samples,
        dt,
    })
}

/// Least-squares slope of `ln |c|` against `t`.
fn log_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let mt = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1.abs().ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, c) in samples {
        sxy += (t - mt) * (c.abs().ln() - my);
        sxx += (t - mt) * (t - mt);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::Domain;

    #[test]
    fn slope_of_exact_exponential() {
        let s: Vec<_> = (0..20).map(|i| (i as f64 * 0.1, -3.0 * (0.7 * i as f64 * 0.1).exp())).collect();
        assert!((log_slope(&s) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn argument_checks() {
        let p = ModelParams::unit(5.0);
        let d = Domain::interval(std::f64::consts::PI).unwrap();
        let g = Grid::uniform(d, 32).unwrap();
        let m = Mode::new(d, 1, 0).unwrap();
        assert!(matches!(measure_growth(&p, &g, &m, 5.0, 0.1, 5.0), Err(GrowthError::SeedTooLarge { .. })));
        assert!(matches!(measure_growth(&p, &g, &m, 5.0, 1e-4, 0.0), Err(GrowthError::BadWindow(_))));
        // grows past the linear ceiling almost immediately
        assert!(matches!(
            measure_growth(&p, &g, &m, 5000.0, 1e-3, 50.0),
            Err(GrowthError::InsufficientWindow { .. })
        ));
    }
}
