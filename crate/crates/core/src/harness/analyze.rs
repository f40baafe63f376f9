//! Bifurcation ladder report for a scenario.

use std::fmt::Write as _;

use crate::bifurcation::{ladder, BifurcationPoint};
use crate::eigenbasis::{Domain, Mode};
use crate::model::ModelParams;

use super::config::ScenarioConfig;
use super::HarnessError;

pub const CSV_HEADER: &str = "m,n,lambda,chi_bar,Q,branch_type,chi_prime,chi_double_prime,stability,minimizer,multiplicity";

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticsReport {
    pub scenario: String,
    pub model: ModelParams,
    pub domain: Domain,
    pub lambda_max: f64,
    pub chi0: f64,
    /// Every mode attaining `chi0`; the first is `k0`.
    pub minimizers: Vec<Mode>,
    /// Sorted by bifurcation value ascending.
    pub rows: Vec<BifurcationPoint>,
}

impl AnalyticsReport {
    pub fn k0(&self) -> &Mode {
        &self.minimizers[0]
    }

    pub fn csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let (m, n) = r.mode.indices();
            let cdp = r.chi_double_prime.map_or(String::new(), |x| x.to_string());
            let _ = writeln!(
                s,
                "{m},{n},{},{},{},{},{},{cdp},{},{},{}",
                r.mode.lambda(),
                r.chi_bar,
                r.q,
                r.branch_type.tag(),
                r.chi_prime,
                r.stability.tag(),
                r.is_minimizer,
                r.mode.multiplicity()
            );
        }
        s
    }

    /// Human-readable table with the threshold and warnings.
    pub fn table(&self) -> String {
        let p = &self.model;
        let mut s = String::new();
        let _ = writeln!(s, "scenario {}", self.scenario);
        let _ = writeln!(
            s,
            "model: d1={} d2={} chi={} mu={} ubar={} alpha={} phi={} f={}",
            p.d1(),
            p.d2(),
            p.chi(),
            p.mu(),
            p.ubar(),
            p.alpha(),
            p.sensitivity(),
            p.kinetics().tag()
        );
        let _ = writeln!(s, "domain: {}  modes with lambda <= {}", self.domain, self.lambda_max);
        let tied = match self.minimizers.len() {
            1 => String::new(),
            k => format!(" (tie of {k} modes)"),
        };
        let _ = writeln!(s, "chi0 = {}  k0 = {}{tied}", self.chi0, self.k0());
        let _ = writeln!(
            s,
            "\n{:>4} {:>4} {:>12} {:>12} {:>10} {:>12} {:>12} {:>13} {:>21} {:>3}",
            "m", "n", "lambda", "chi_bar", "Q", "branch", "chi'", "chi''", "stability", "min"
        );
        for r in &self.rows {
            let (m, n) = r.mode.indices();
            let cdp = r.chi_double_prime.map_or("-".to_string(), |x| format!("{x:.6e}"));
            let _ = writeln!(
                s,
                "{m:>4} {n:>4} {:>12.6} {:>12.6} {:>10.5} {:>12} {:>12.5e} {cdp:>13} {:>21} {:>3}",
                r.mode.lambda(),
                r.chi_bar,
                r.q,
                r.branch_type.tag(),
                r.chi_prime,
                r.stability.tag(),
                if r.is_minimizer { "*" } else { "" }
            );
            for w in &r.warnings {
                let _ = writeln!(s, "           warning: {w}");
            }
        }
        s
    }
}

/// Ladder of every mode with `lambda <= lambda_max`, defaulting to the
/// range that is guaranteed to contain the threshold mode.
pub fn cmd_analyze(cfg: &ScenarioConfig, lambda_max: Option<f64>) -> Result<AnalyticsReport, HarnessError> {
    let err = |source| HarnessError::Bifurcation { scenario: cfg.name.clone(), source };
    let (threshold, rows) = match lambda_max {
        Some(l) => ladder(&cfg.model, &cfg.domain, l).map_err(err)?,
        None => {
            let t = crate::bifurcation::chi_threshold(&cfg.model, &cfg.domain).map_err(err)?;
            ladder(&cfg.model, &cfg.domain, t.cutoff).map_err(err)?
        }
    };
    Ok(AnalyticsReport {
        scenario: cfg.name.clone(),
        model: cfg.model,
        domain: cfg.domain,
        lambda_max: lambda_max.unwrap_or(threshold.cutoff),
        chi0: threshold.chi0,
        minimizers: threshold.minimizers.clone(),
        rows,
    })
}
