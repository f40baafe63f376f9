//! One-parameter sweeps run in parallel.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::eigenbasis::{Domain, DomainKind};
use crate::grid::MIN_CELLS;
use crate::model::ModelError;

use super::config::ScenarioConfig;
use super::simulate::run_scenario;
use super::HarnessError;

pub const CSV_HEADER: &str = "value,outcome,max_u,dominant_mode,residual,peaks,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Chi,
    D2,
    D1,
    Mu,
    /// Side length; the grid keeps its spacing.
    L,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [SweepAxis::Chi, SweepAxis::D2, SweepAxis::D1, SweepAxis::Mu, SweepAxis::L];

    pub fn tag(self) -> &'static str {
        match self {
            SweepAxis::Chi => "chi",
            SweepAxis::D2 => "d2",
            SweepAxis::D1 => "d1",
            SweepAxis::Mu => "mu",
            SweepAxis::L => "L",
        }
    }

    /// `cfg` with this parameter set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, String> {
        let mut out = cfg.clone();
        let p = cfg.model;
        let model = |r: Result<_, ModelError>| r.map_err(|e| e.to_string());
        match self {
            SweepAxis::Chi => out.model = model(p.with_chi(value))?,
            SweepAxis::D2 => out.model = model(p.with_d2(value))?,
            SweepAxis::D1 => out.model = model(p.with_d1(value))?,
            SweepAxis::Mu => out.model = model(p.with_mu(value))?,
            SweepAxis::L => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(format!("L must be positive (got {value})"));
                }
                let scale = |n: usize, l: f64| ((n as f64 * value / l).round() as usize).max(MIN_CELLS);
                match cfg.domain.kind() {
                    DomainKind::Interval => {
                        out.domain = Domain::interval(value).map_err(|e| e.to_string())?;
                        out.nx = scale(cfg.nx, cfg.domain.lx());
                    }
                    DomainKind::Rectangle => {
                        let ly = cfg.domain.ly().expect("rectangle has a height");
                        out.domain = Domain::rectangle(value, value).map_err(|e| e.to_string())?;
                        out.nx = scale(cfg.nx, cfg.domain.lx());
                        out.ny = scale(cfg.ny, ly);
                    }
                }
            }
        }
        out.name = format!("{}_{}{value}", cfg.name, self.tag());
        Ok(out)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| format!("unknown sweep axis `{s}` (expected chi, d2, d1, mu or L)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub outcome: &'static str,
    pub max_u: f64,
    pub dominant: Option<(usize, usize)>,
    pub residual: f64,
    pub peaks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// A failed run keeps its message and the sweep carries on.
    pub result: Result<SweepResult, String>,
}

fn run_one(cfg: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<SweepResult, String> {
    let cfg = axis.apply(cfg, value)?;
    let s = run_scenario(&cfg).map_err(|e: HarnessError| e.to_string())?;
    Ok(SweepResult {
        outcome: s.report.outcome.tag(),
        max_u: s.report.final_state.max_u(),
        dominant: s.dominant.map(|d| d.0),
        residual: s.report.final_residual(),
        peaks: s.peaks.len(),
    })
}

/// Runs `cfg` once per value, in parallel; rows keep the input order.
pub fn cmd_sweep(cfg: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&value| SweepRow { value, result: run_one(cfg, axis, value) })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for row in rows {
        match &row.result {
            Ok(r) => {
                let mode = r.dominant.map_or(String::new(), |(m, n)| format!("{m}:{n}"));
                let _ = writeln!(s, "{},{},{},{mode},{},{},", row.value, r.outcome, r.max_u, r.residual, r.peaks);
            }
            Err(e) => {
                let _ = writeln!(s, "{},error,,,,,\"{}\"", row.value, e.replace('"', "'"));
            }
        }
    }
    s
}
