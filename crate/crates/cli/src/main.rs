use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use chemotaxis::harness::sweep::sweep_csv;
use chemotaxis::harness::{
    catalog_entry, cmd_analyze, cmd_simulate, cmd_sweep, emit, parse_config, scenario_catalog, HarnessError,
    ScenarioConfig, SweepAxis,
};

/// Keller-Segel chemotaxis with logistic growth: bifurcation analytics and
/// simulation.
#[derive(Debug, Parser)]
#[command(name = "chemotaxis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bifurcation ladder, threshold and branch classification.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Largest eigenvalue to tabulate (default: enough to contain k0).
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Also write the table as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrate a scenario and write fields, heatmaps and monitors.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// chi, d2, d1, mu or L
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Built-in scenarios.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// Names of the built-in scenarios.
    List,
    /// Print a built-in scenario as a config file.
    Emit { name: String },
}

/// Exit status classes.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_config() {
            Failure::Config(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn runtime_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(config_err)?;
    parse_config(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(config_err)
}

fn parse_values(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(config_err(anyhow!("sweep value `{s}` is not a finite number"))),
        })
        .collect()
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(runtime_err)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { config, lambda_max, csv } => {
            if let Some(l) = lambda_max {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(config_err(anyhow!("--lambda-max must be positive (got {l})")));
                }
            }
            let cfg = load(&config)?;
            let report = cmd_analyze(&cfg, lambda_max)?;
            print!("{}", report.table());
            if let Some(path) = csv {
                write(&path, &report.csv())?;
            }
        }
        Command::Simulate { config, out } => {
            let cfg = load(&config)?;
            let summary = cmd_simulate(&cfg, &out)?;
            print!("{}", summary.text());
        }
        Command::Sweep { config, axis, values, out } => {
            let axis: SweepAxis = axis.parse().map_err(|e: String| config_err(anyhow!(e)))?;
            let values = parse_values(&values)?;
            let cfg = load(&config)?;
            let rows = cmd_sweep(&cfg, axis, &values);
            let text = sweep_csv(&rows);
            fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(runtime_err)?;
            write(&out.join(format!("{}_sweep_{axis}.csv", cfg.name)), &text)?;
            print!("{text}");
        }
        Command::Catalog { action: CatalogAction::List } => {
            for c in scenario_catalog() {
                let (nx, ny) = (c.nx, c.ny);
                println!("{:<10} {} grid {nx}x{ny}", c.name, c.domain);
            }
        }
        Command::Catalog { action: CatalogAction::Emit { name } } => {
            let cfg = catalog_entry(&name).ok_or_else(|| config_err(anyhow!("no catalog entry named `{name}`")))?;
            print!("{}", emit(&cfg));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
