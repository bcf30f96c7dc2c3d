//! Command-line front end: argument parsing, validation and report rendering.
//!
//! Rendering returns the complete output as a string, so a failing run writes nothing.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{evaluate_bounds, Backend, BoundReport};
use crate::bunching::{
    projector_report, quantum_event_probabilities, EventSpec, ExperimentConfig, ProjectorReport,
};
use crate::fock::Reflectivity;
use crate::hv::{
    analytic_event_probs, joint_pattern_distribution, monte_carlo_event_probs, sweep_csv,
    sweep_sum, BiasParameter, EventPattern, JointMethod, PatternDistribution,
};
use crate::numfmt::sig12;

pub const SEED_ENV: &str = "BUNCHLAB_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SWEEP_STEPS: usize = 11;

#[derive(Debug, Parser)]
#[command(
    name = "bunchlab",
    version,
    about = "Three-boson bunching: quantum vs hidden-variable model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Bias δ of the hidden-variable routing rule, in [0, 1]
    #[arg(long, global = true, conflicts_with_all = ["from", "to"])]
    pub delta: Option<f64>,

    /// First δ of a sweep grid
    #[arg(long, global = true)]
    pub from: Option<f64>,

    /// Last δ of a sweep grid
    #[arg(long, global = true)]
    pub to: Option<f64>,

    /// Number of evenly spaced sweep points, endpoints included
    #[arg(long, global = true)]
    pub steps: Option<usize>,

    /// Monte Carlo samples per estimate
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,

    #[arg(long, global = true, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Beam-splitter reflectivity for the quantum backend, in [0, 1]
    #[arg(long, global = true, default_value_t = 0.5)]
    pub reflectivity: f64,

    /// Output format; `projectors` defaults to json, everything else to csv
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Quantum event probabilities and bound report
    Quantum,
    /// Hidden-variable model: analytic and Monte Carlo probabilities, joint patterns
    Hv,
    /// Sweep δ and tabulate analytic and Monte Carlo event sums
    Sweep,
    /// Projector algebra diagnostics
    Projectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] crate::Error),
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage errors, 1 for anything that went wrong while computing.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Parsed and validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub delta: BiasParameter,
    pub grid: Vec<BiasParameter>,
    pub samples: u64,
    pub seed: u64,
    pub reflectivity: Reflectivity,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let usage = |msg: String| CliError::Usage(msg);

        let delta =
            BiasParameter::new(cli.delta.unwrap_or(0.0)).map_err(|e| usage(e.to_string()))?;
        let reflectivity = Reflectivity::new(cli.reflectivity).map_err(|e| usage(e.to_string()))?;
        if cli.samples == 0 {
            return Err(usage("--samples must be at least 1".into()));
        }

        let has_grid = cli.from.is_some() || cli.to.is_some() || cli.steps.is_some();
        if has_grid && cli.command != Command::Sweep {
            return Err(usage("--from/--to/--steps only apply to `sweep`".into()));
        }
        let grid = if has_grid {
            let (Some(from), Some(to)) = (cli.from, cli.to) else {
                return Err(usage("a sweep grid needs both --from and --to".into()));
            };
            let steps = cli.steps.unwrap_or(DEFAULT_SWEEP_STEPS);
            linspace(from, to, steps)
                .map_err(usage)?
                .into_iter()
                .map(|x| BiasParameter::new(x).map_err(|e| usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            vec![delta]
        };

        let format = cli.format.unwrap_or(match cli.command {
            Command::Projectors => Format::Json,
            _ => Format::Csv,
        });

        Ok(RunConfig {
            command: cli.command,
            delta,
            grid,
            samples: cli.samples,
            seed: cli.seed,
            reflectivity,
            format,
            out: cli.out.clone(),
        })
    }
}

fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !from.is_finite() || !to.is_finite() {
        return Err(format!("non-finite grid bounds {from}..{to}"));
    }
    match steps {
        0 => Err("--steps must be at least 1".into()),
        1 => Ok(vec![from]),
        n => Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

/// Renders the full output of one run.
pub fn render(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        Command::Quantum => cmd_quantum(cfg),
        Command::Hv => cmd_hv(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Projectors => cmd_projectors(cfg),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Invariant(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

const BOUNDS_CSV_HEADER: &str = "backend,p_ab,p_bc,p_ac,sum,sum_stderr,\
exclusivity_violated,no_disturbance_saturated,no_disturbance_exceeded";

fn bounds_csv_row(r: &BoundReport) -> String {
    let [ab, bc, ac] = r.probabilities;
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        r.backend,
        sig12(ab),
        sig12(bc),
        sig12(ac),
        sig12(r.sum),
        r.sum_stderr().map(sig12).unwrap_or_default(),
        r.exclusivity_violated,
        r.no_disturbance_saturated,
        r.no_disturbance_exceeded
    )
}

pub fn cmd_quantum(cfg: &RunConfig) -> Result<String, CliError> {
    let exp = ExperimentConfig::new(cfg.reflectivity);
    let probs = quantum_event_probabilities(&exp)?;
    let report = evaluate_bounds(Backend::Quantum, probs, None)?;
    match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => Ok(format!("{BOUNDS_CSV_HEADER}\n{}", bounds_csv_row(&report))),
    }
}

#[derive(Serialize)]
struct JointTables {
    exact: Option<PatternDistribution>,
    monte_carlo: PatternDistribution,
}

#[derive(Serialize)]
struct HvReport {
    delta: f64,
    samples: u64,
    seed: u64,
    events: Vec<String>,
    analytic: BoundReport,
    monte_carlo: BoundReport,
    joint: JointTables,
}

pub fn cmd_hv(cfg: &RunConfig) -> Result<String, CliError> {
    let delta = cfg.delta;
    let analytic = evaluate_bounds(Backend::HvAnalytic, analytic_event_probs(delta), None)?;
    let mc = monte_carlo_event_probs(delta, cfg.samples, cfg.seed)?;
    let monte_carlo = evaluate_bounds(
        Backend::HvMc,
        mc.map(|e| e.estimate),
        Some(mc.map(|e| e.stderr)),
    )?;
    let exact = if delta.value() == 0.0 {
        Some(joint_pattern_distribution(delta, JointMethod::Exact)?)
    } else {
        None
    };
    let joint_mc = joint_pattern_distribution(
        delta,
        JointMethod::MonteCarlo {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    )?;

    match cfg.format {
        Format::Json => to_json(&HvReport {
            delta: delta.value(),
            samples: cfg.samples,
            seed: cfg.seed,
            events: EventSpec::canonical()
                .iter()
                .map(EventSpec::label)
                .collect(),
            analytic,
            monte_carlo,
            joint: JointTables {
                exact,
                monte_carlo: joint_mc,
            },
        }),
        Format::Csv => {
            let mut out = format!("{BOUNDS_CSV_HEADER}\n");
            out.push_str(&bounds_csv_row(&analytic));
            out.push_str(&bounds_csv_row(&monte_carlo));
            out.push('\n');
            out.push_str("pattern,ab,bc,ac,exact_probability,mc_probability,mc_count\n");
            let counts = joint_mc.counts.unwrap_or_default();
            for (i, count) in counts.iter().enumerate() {
                let p = EventPattern::from_index(i);
                let [ab, bc, ac] = p.0;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    p.label(),
                    u8::from(ab),
                    u8::from(bc),
                    u8::from(ac),
                    exact
                        .as_ref()
                        .map(|d| sig12(d.probabilities[i]))
                        .unwrap_or_default(),
                    sig12(joint_mc.probabilities[i]),
                    count
                );
            }
            Ok(out)
        }
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = sweep_sum(&cfg.grid, cfg.samples, cfg.seed)?;
    match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv => Ok(sweep_csv(&rows)),
    }
}

pub fn cmd_projectors(cfg: &RunConfig) -> Result<String, CliError> {
    let report: ProjectorReport = projector_report(&ExperimentConfig::new(cfg.reflectivity))?;
    if !report.all_projectors_valid() {
        return Err(CliError::Invariant(
            "a projector is not Hermitian and idempotent within tolerance".into(),
        ));
    }
    match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from(
                "event,probability,trace,rank,hermiticity_residual,idempotence_residual\n",
            );
            for p in &report.projectors {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.event,
                    sig12(p.probability),
                    sig12(p.trace),
                    p.rank,
                    sig12(p.hermiticity_residual),
                    sig12(p.idempotence_residual)
                );
            }
            out.push_str("\nfirst,second,product_norm,commutator_norm\n");
            for pair in &report.pairs {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    pair.first,
                    pair.second,
                    sig12(pair.product_norm),
                    sig12(pair.commutator_norm)
                );
            }
            Ok(out)
        }
    }
}

/// Validates, renders and writes the output to stdout or `--out`.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let text = render(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
