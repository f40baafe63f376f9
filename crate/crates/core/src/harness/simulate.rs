//! Scenario runs with field, heatmap and monitor output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::eigenbasis::Mode;
use crate::grid::Grid;
use crate::solver::{CosineSpectrum, FieldState, RunReport, Simulation};

use super::config::{FieldName, ScenarioConfig};
use super::init::initial_state;
use super::output::{field_csv, time_label, write_file, write_heatmap};
use super::pattern::{local_maxima, Peak};
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub scenario: String,
    pub grid: Grid,
    pub report: RunReport,
    /// Local maxima of the final density.
    pub peaks: Vec<Peak>,
    /// Nonzero discrete cosine mode carrying the most energy of the final
    /// density, with its share of the nonzero-mode energy.
    pub dominant: Option<((usize, usize), f64)>,
    pub files: Vec<PathBuf>,
}

impl SimulationSummary {
    pub fn text(&self) -> String {
        let r = &self.report;
        let s = &r.final_state;
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}: {} at t = {}", self.scenario, r.outcome.tag(), r.t_end);
        if let crate::solver::Outcome::BlowUp(reason) = r.outcome {
            let _ = writeln!(out, "  blow-up: {reason:?}");
        }
        let _ = writeln!(out, "  steps {} (rejected {}), residual {:e}", r.steps, r.rejected, r.final_residual());
        let _ = writeln!(out, "  u in [{}, {}]", s.min_u(), s.max_u());
        if let Some(((m, n), share)) = self.dominant {
            let _ = writeln!(out, "  dominant mode ({m}, {n}) with {:.1}% of nonzero-mode energy", 100.0 * share);
        }
        for e in &r.modal_energies {
            let _ = writeln!(out, "  {}: coefficient {:e}, energy share {:.4}", e.mode, e.coefficient, e.fraction);
        }
        let _ = writeln!(out, "  {} local maxima of u", self.peaks.len());
        for p in self.peaks.iter().take(10) {
            let _ = writeln!(out, "    ({:.4}, {:.4}) u = {}", p.x, p.y, p.value);
        }
        let _ = writeln!(out, "  {} files written", self.files.len());
        out
    }
}

fn write_fields(
    cfg: &ScenarioConfig,
    dir: &Path,
    grid: &Grid,
    state: &FieldState,
    label: &str,
    files: &mut Vec<PathBuf>,
) -> Result<(), HarnessError> {
    if cfg.output.csv {
        let path = dir.join(format!("{}_t{label}.csv", cfg.name));
        write_file(&path, field_csv(grid, &state.u, &state.v).as_bytes())?;
        files.push(path);
    }
    if cfg.output.heatmaps {
        for f in &cfg.output.fields {
            let field = match f {
                FieldName::U => &state.u,
                FieldName::V => &state.v,
            };
            let stem = format!("{}_{}_t{label}", cfg.name, f.tag());
            files.extend(write_heatmap(dir, &stem, grid, field)?);
        }
    }
    Ok(())
}

fn monitor_csv(report: &RunReport) -> String {
    let mut s = String::from("t,min_u,max_u,mass_u,mass_v,residual,rate,dt\n");
    for m in &report.monitors {
        let _ = writeln!(s, "{},{},{},{},{},{},{},{}", m.t, m.min_u, m.max_u, m.mass_u, m.mass_v, m.residual, m.rate, m.dt);
    }
    s
}

/// Runs the scenario without writing anything.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimulationSummary, HarnessError> {
    simulate_into(cfg, None)
}

/// Runs the scenario and writes fields at each configured time and at the
/// end, plus `<scenario>_monitor.csv` and `<scenario>_summary.txt`, into `out`.
pub fn cmd_simulate(cfg: &ScenarioConfig, out: &Path) -> Result<SimulationSummary, HarnessError> {
    fs::create_dir_all(out).map_err(HarnessError::io(out))?;
    simulate_into(cfg, Some(out))
}

fn simulate_into(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<SimulationSummary, HarnessError> {
    let scenario = || cfg.name.clone();
    let grid = cfg.grid().map_err(|source| HarnessError::Grid { scenario: scenario(), source })?;
    let mut controls = cfg.run.controls();
    controls.energy_modes = cfg
        .output
        .modes
        .iter()
        .map(|&(m, n)| Mode::new(cfg.domain, m, n))
        .collect::<Result<_, _>>()
        .map_err(|source| HarnessError::Eigen { scenario: scenario(), source })?;
    let initial = initial_state(cfg)?;
    let mut sim = Simulation::new(cfg.model, grid, initial)
        .map_err(|source| HarnessError::Solver { scenario: scenario(), source })?;

    let mut files = Vec::new();
    let mut write_error = None;
    let stops = cfg.output.times.clone();
    let mut next = 0;
    let report = sim
        .run_observed(&controls, &stops, |state| {
            let Some(&t) = stops.get(next) else { return };
            next += 1;
            if let (Some(dir), None) = (out, &write_error) {
                if let Err(e) = write_fields(cfg, dir, &grid, state, &time_label(t), &mut files) {
                    write_error = Some(e);
                }
            }
        })
        .map_err(|source| HarnessError::Solver { scenario: scenario(), source })?;
    if let Some(e) = write_error {
        return Err(e);
    }

    let s = &report.final_state;
    let spectrum = CosineSpectrum::new(&grid, &s.u);
    let total = spectrum.nonzero_energy();
    let dominant = spectrum
        .dominant()
        .filter(|_| total > 0.0)
        .map(|(mode, e)| (mode, e / total));
    let peaks = if s.is_finite() { local_maxima(&grid, &s.u) } else { Vec::new() };
    let mut summary = SimulationSummary {
        scenario: cfg.name.clone(),
        grid,
        dominant,
        peaks,
        files: Vec::new(),
        report,
    };
    if let Some(dir) = out {
        write_fields(cfg, dir, &grid, &summary.report.final_state, &time_label(summary.report.t_end), &mut files)?;
        let monitor = dir.join(format!("{}_monitor.csv", cfg.name));
        write_file(&monitor, monitor_csv(&summary.report).as_bytes())?;
        files.push(monitor);
        let text = dir.join(format!("{}_summary.txt", cfg.name));
        files.push(text.clone());
        summary.files = files;
        write_file(&text, summary.text().as_bytes())?;
    }
    Ok(summary)
}
