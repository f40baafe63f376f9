//! Initial fields from a scenario's initial-data family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bifurcation::{branch_seed, chi_threshold};
use crate::eigenbasis::Mode;
use crate::solver::FieldState;

use super::config::{InitSpec, ScenarioConfig};
use super::HarnessError;

/// Samples the initial data of `cfg` at the cell centres of its grid.
///
/// White noise draws `u` for every cell in storage order and then `v`, each
/// uniform in `[-amp, amp]`, from a ChaCha8 stream seeded by the config.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<FieldState, HarnessError> {
    let scenario = || cfg.name.clone();
    let grid = cfg.grid().map_err(|source| HarnessError::Grid { scenario: scenario(), source })?;
    let p = &cfg.model;
    let (ubar, vbar) = p.homogeneous_state();
    let (u, v) = match cfg.init {
        InitSpec::Expression { u, v } => (grid.sample(|x, y| u.eval(p, x, y)), grid.sample(|x, y| v.eval(p, x, y))),
        InitSpec::BranchSeed { mode, s } => {
            let mode = match mode {
                Some((m, n)) => Mode::new(cfg.domain, m, n)
                    .map_err(|source| HarnessError::Eigen { scenario: scenario(), source })?,
                None => *chi_threshold(p, &cfg.domain)
                    .map_err(|source| HarnessError::Bifurcation { scenario: scenario(), source })?
                    .k0(),
            };
            branch_seed(p, &mode, s)
                .map_err(|source| HarnessError::Bifurcation { scenario: scenario(), source })?
                .sample(&grid)
        }
        InitSpec::WhiteNoise { amp, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = |base: f64| base + amp * rng.gen_range(-1.0..=1.0);
            let u = (0..grid.len()).map(|_| draw(ubar)).collect();
            let v = (0..grid.len()).map(|_| draw(vbar)).collect();
            (u, v)
        }
    };
    Ok(FieldState::new(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{project, Domain};
    use crate::harness::config::parse_config;

    fn config(init: &str) -> ScenarioConfig {
        parse_config(&format!(
            "model.d1 = 1\nmodel.d2 = 1\nmodel.chi = 5\nmodel.mu = 1\nmodel.ubar = 1\n\
             domain.kind = interval\ndomain.lx = pi\ngrid.nx = 64\n{init}"
        ))
        .unwrap()
    }

    #[test]
    fn noise_is_seeded_and_bounded() {
        let a = initial_state(&config("init.kind = white_noise\ninit.amp = 0.01\ninit.seed = 7\n")).unwrap();
        let b = initial_state(&config("init.kind = white_noise\ninit.amp = 0.01\ninit.seed = 7\n")).unwrap();
        let c = initial_state(&config("init.kind = white_noise\ninit.amp = 0.01\ninit.seed = 8\n")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.u, c.u);
        assert!(a.u.iter().chain(&a.v).all(|x| (x - 1.0).abs() <= 0.01));
    }

    #[test]
    fn branch_seed_defaults_to_threshold_mode() {
        let cfg = config("init.kind = branch_seed\ninit.s = 0.01\n");
        let s = initial_state(&cfg).unwrap();
        let g = cfg.grid().unwrap();
        let mode = Mode::new(Domain::interval(std::f64::consts::PI).unwrap(), 1, 0).unwrap();
        let du: Vec<f64> = s.u.iter().map(|x| x - 1.0).collect();
        let dv: Vec<f64> = s.v.iter().map(|x| x - 1.0).collect();
        let ratio = project(&du, &g, &mode).unwrap() / project(&dv, &g, &mode).unwrap();
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expression_uses_the_model_levels() {
        let cfg = config("init.kind = expression\ninit.u.base = 2ubar\ninit.v.base = vbar\ninit.v.shape = cosine\ninit.v.amp = 0.5\n");
        let s = initial_state(&cfg).unwrap();
        assert!(s.u.iter().all(|&x| x == 2.0));
        assert!(s.v.iter().all(|&x| x == 1.5));
    }
}
