//! `bdspec`: run one computation described by a JSON job config and emit
//! the result as CSV or JSON.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 when the
//! `verify` computation finds a failing invariant.

mod config;
mod output;

use clap::Parser;
use config::{build_model, Computation, JobConfig, Model, OutputFormat};
use output::{Artifact, TimeAxis};
use std::path::PathBuf;
use std::process::ExitCode;

use bdspec::evolve::{
    classical_ct_distribution, classical_dt_distribution, detect_period, long_time_average,
    quantum_dt_pair_amplitude, quantum_pair_amplitude, InitialDistribution,
};
use bdspec::process::build_weights;
use bdspec::verify::{all_passed, verify_family, verify_rates};

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl From<bdspec::Error> for CliError {
    fn from(e: bdspec::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "bdspec",
    version,
    about = "Spectral evolution of birth-death chains and their quantum analogues"
)]
struct Cli {
    /// What to compute; may also be given as `computation` in the config.
    #[arg(value_enum)]
    computation: Option<Computation>,

    /// Path to the JSON job configuration.
    #[arg(long)]
    config: PathBuf,

    /// Patch one config field, repeatable: N, p, a, b, q, t_S.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format (default json; the config may also set it).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Validation(format!("config {}: {e}", cli.config.display())))?;
    let mut cfg = JobConfig::from_json(&text)?;
    for patch in &cli.overrides {
        cfg.apply_override(patch)?;
    }
    cfg.validate_grids()?;

    let computation = cli.computation.or(cfg.computation).ok_or_else(|| {
        CliError::Validation(
            "no computation requested (give one as the first argument or in the config)".into(),
        )
    })?;
    let format = cli.format.or(cfg.format).unwrap_or(OutputFormat::Json);
    let out_path = cli.out.clone().or_else(|| cfg.out.clone());

    let model = build_model(&cfg)?;
    let (artifact, status) = execute(computation, &cfg, &model)?;

    let rendered = output::render(&artifact, format);
    match &out_path {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(status)
}

/// The step length for discrete-time computations: explicit `t_S`, else the
/// table's default stable step.
fn step_length(cfg: &JobConfig, model: &Model) -> Result<f64, CliError> {
    match cfg.t_s {
        None => Ok(model.rates.default_step()),
        Some(t_s) if t_s.is_finite() && t_s > 0.0 => Ok(t_s),
        Some(t_s) => Err(CliError::Validation(format!(
            "t_S = {t_s}: must be finite and positive"
        ))),
    }
}

/// The start of a classical evolution: a point mass at `y` or an explicit
/// distribution.
fn initial_distribution(cfg: &JobConfig, dim: usize) -> Result<InitialDistribution, CliError> {
    match (cfg.y, &cfg.init) {
        (Some(_), Some(_)) => Err(CliError::Validation(
            "exactly one of `y` and `init` must be given; got both".into(),
        )),
        (Some(y), None) => Ok(InitialDistribution::point_mass(dim, y)?),
        (None, Some(init)) => Ok(InitialDistribution::new(init.clone())?),
        (None, None) => Err(CliError::Validation(
            "this computation needs a start: give `y` or `init`".into(),
        )),
    }
}

/// The source state of a quantum evolution (amplitudes are pairwise, so an
/// `init` vector is not meaningful here).
fn source_state(cfg: &JobConfig) -> Result<usize, CliError> {
    cfg.y
        .ok_or_else(|| CliError::Validation("this computation needs a source state `y`".into()))
}

fn quantum_grid(
    model: &Model,
    y: usize,
    times: &[f64],
    t_s: Option<f64>,
    steps: &[u64],
) -> Result<Vec<Vec<num_complex::Complex64>>, CliError> {
    let dim = model.eigen.dim();
    let count = if t_s.is_some() {
        steps.len()
    } else {
        times.len()
    };
    let mut values = vec![Vec::with_capacity(dim); count];
    for x in 0..dim {
        let column = match t_s {
            Some(t_s) => quantum_dt_pair_amplitude(&model.eigen, t_s, x, y, steps)?,
            None => quantum_pair_amplitude(&model.eigen, x, y, times)?,
        };
        for (ti, amp) in column.into_iter().enumerate() {
            values[ti].push(amp);
        }
    }
    Ok(values)
}

fn execute(
    computation: Computation,
    cfg: &JobConfig,
    model: &Model,
) -> Result<(Artifact, ExitCode), CliError> {
    let ok = ExitCode::SUCCESS;
    let artifact = match computation {
        Computation::Spectrum => Artifact::Spectrum(model.eigen.eigenvalues().to_vec()),
        Computation::Stationary => Artifact::Stationary(build_weights(&model.rates).pi_vec()),
        Computation::ClassicalCt => {
            let times = cfg.required_times()?;
            let p0 = initial_distribution(cfg, model.eigen.dim())?;
            let grid = classical_ct_distribution(&model.eigen, &p0, times)?;
            Artifact::Classical {
                axis: TimeAxis::Continuous(grid.times),
                values: grid.values,
            }
        }
        Computation::ClassicalDt => {
            let steps = cfg.required_steps()?;
            let t_s = step_length(cfg, model)?;
            let p0 = initial_distribution(cfg, model.eigen.dim())?;
            let grid = classical_dt_distribution(&model.eigen, t_s, &p0, steps)?;
            Artifact::Classical {
                axis: TimeAxis::Steps(steps.to_vec()),
                values: grid.values,
            }
        }
        Computation::QuantumCt => {
            let times = cfg.required_times()?;
            let y = source_state(cfg)?;
            let values = quantum_grid(model, y, times, None, &[])?;
            Artifact::Quantum {
                axis: TimeAxis::Continuous(times.to_vec()),
                values,
            }
        }
        Computation::QuantumDt => {
            let steps = cfg.required_steps()?;
            let t_s = step_length(cfg, model)?;
            let y = source_state(cfg)?;
            let values = quantum_grid(model, y, &[], Some(t_s), steps)?;
            Artifact::Quantum {
                axis: TimeAxis::Steps(steps.to_vec()),
                values,
            }
        }
        Computation::LongTimeAverage => Artifact::LongTimeAverage(long_time_average(&model.eigen)),
        Computation::Period => Artifact::Period(detect_period(model.eigen.eigenvalues())),
        Computation::Verify => {
            let reports = match &model.family {
                Some(fam) => verify_family(fam)?,
                None => verify_rates(&model.rates)?,
            };
            let status = if all_passed(&reports) {
                ok
            } else {
                ExitCode::from(3)
            };
            return Ok((Artifact::Verify(reports), status));
        }
    };
    Ok((artifact, ok))
}
