//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad input, 3 `--expect-violation`
//! not met, 4 resource limit.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::correlator::QuantumNetwork;
use crate::error::{NetworkError, Result};
use crate::inequality::{closed_form_smax, evaluate_s, is_violation};
use crate::lhv::{lhv_best_s, LhvModel, LhvSearchOptions};
use crate::optimizer::{optimize_alpha_equal, optimize_alpha_free, sig9, sweep, write_sweep_csv};
use crate::quantum::parse_angle_list;
use crate::topology::{build_chain, build_star, build_tree, Edge, NetworkConfig, NodeId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXPECTATION: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nlocal", version, about = "n-local inequalities on (n,m,p) quantum networks")]
pub struct Cli {
    /// Topology JSON file.
    #[arg(long, global = true)]
    pub topology: Option<PathBuf>,

    /// Source angles θ_r, comma separated; radians or multiples of π ("0.25pi").
    /// For `sweep` this is the per-source grid.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,

    /// Extremal angles α_j, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Exit with code 3 unless the evaluated S violates the n-local bound.
    #[arg(long, global = true)]
    pub expect_violation: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Chain,
    Star,
    Tree,
    Custom,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a topology file.
    Generate {
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Custom edges in source order, e.g. "B1-A1,A1-B2".
        #[arg(long)]
        edges: Option<String>,
    },
    /// Report every violated structural constraint of a topology file.
    Validate,
    /// Evaluate I0, I1 and S for the canonical Pauli measurements.
    Evaluate,
    /// Maximize S over the extremal angles.
    Maximize {
        /// Optimize every α_j independently (starting from --alpha if given).
        #[arg(long)]
        free: bool,
    },
    /// Tabulate the equal-angle maximum over a θ grid as CSV.
    Sweep,
    /// Search n-local hidden-variable models for the largest S.
    Lhv {
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value_t = 11)]
        grid_steps: usize,
        #[arg(long, default_value_t = 1u128 << 26)]
        cap: u128,
        /// Also write the best model to this file.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct EvaluateReport {
    #[serde(rename = "I0")]
    i0: f64,
    #[serde(rename = "I1")]
    i1: f64,
    #[serde(rename = "S")]
    s: f64,
    bound: f64,
    violated: bool,
    alpha_star_hint: f64,
}

#[derive(Serialize)]
struct MaximizeReport {
    alpha_star: f64,
    smax: f64,
    violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    free: Option<FreeReport>,
}

#[derive(Serialize)]
struct FreeReport {
    alphas: Vec<f64>,
    smax: f64,
    converged: bool,
    sweeps: usize,
}

#[derive(Serialize)]
struct LhvReport<'a> {
    best_s: f64,
    grid_best_s: f64,
    bound: f64,
    certified: bool,
    tables_enumerated: String,
    distinct_patterns: usize,
    model: &'a LhvModel,
}

enum Failure {
    Error(NetworkError),
    Expectation(String),
}

impl From<NetworkError> for Failure {
    fn from(value: NetworkError) -> Self {
        Self::Error(value)
    }
}

fn exit_code(err: &NetworkError) -> i32 {
    match err {
        NetworkError::ResourceLimit { .. } => EXIT_RESOURCE,
        NetworkError::Io(_) => EXIT_IO,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Expectation(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            EXIT_EXPECTATION
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(cli: &Cli, stdout: &mut dyn Write, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(cli, stdout, &text)
}

fn load_topology(cli: &Cli) -> Result<NetworkConfig> {
    let path = cli.topology.as_ref().ok_or_else(|| NetworkError::InvalidParameter("--topology is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| NetworkError::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    NetworkConfig::from_json(&text)
}

fn angles(flag: &Option<String>, name: &str, expected: Option<usize>) -> Result<Vec<f64>> {
    let text = flag.as_deref().ok_or_else(|| NetworkError::InvalidParameter(format!("--{name} is required")))?;
    let values = parse_angle_list(text)?;
    if let Some(expected) = expected {
        if values.len() != expected {
            return Err(NetworkError::InvalidParameter(format!(
                "--{name} has {} values, expected {expected}",
                values.len()
            )));
        }
    }
    Ok(values)
}

fn require(value: Option<usize>, name: &str) -> Result<usize> {
    value.ok_or_else(|| NetworkError::InvalidParameter(format!("--{name} is required")))
}

fn parse_edges(text: &str) -> Result<Vec<Edge>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .enumerate()
        .map(|(k, pair)| {
            let (a, b) = pair
                .split_once('-')
                .ok_or_else(|| NetworkError::Parse(format!("edge {pair:?} is not of the form X-Y")))?;
            Ok(Edge::new(k + 1, a.parse::<NodeId>()?, b.parse::<NodeId>()?))
        })
        .collect()
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Generate { kind, n, m, p, edges } => {
            let config = match kind {
                Kind::Chain => build_chain(require(*n, "n")?)?,
                Kind::Star => build_star(require(*n, "n")?)?,
                Kind::Tree => build_tree(require(*n, "n")?, require(*m, "m")?)?,
                Kind::Custom => {
                    let edges = parse_edges(edges.as_deref().unwrap_or(""))?;
                    NetworkConfig::checked(require(*n, "n")?, require(*m, "m")?, require(*p, "p")?, edges)?
                }
            };
            emit(cli, stdout, &(config.to_json()? + "\n"))?;
        }
        Command::Validate => {
            let config = load_topology(cli)?;
            let violations = config.validate();
            emit_json(cli, stdout, &serde_json::json!({ "valid": violations.is_empty(), "violations": violations }))?;
            if !violations.is_empty() {
                return Err(NetworkError::InvalidTopology(violations).into());
            }
        }
        Command::Evaluate => {
            let config = load_topology(cli)?;
            config.ensure_valid()?;
            let thetas = angles(&cli.theta, "theta", Some(config.n))?;
            let alphas = angles(&cli.alpha, "alpha", Some(config.p))?;
            let result = evaluate_s(&QuantumNetwork::canonical(&config, &thetas, &alphas)?)?;
            let report = EvaluateReport {
                i0: sig9(result.i0),
                i1: sig9(result.i1),
                s: sig9(result.s),
                bound: result.bound,
                violated: result.violated,
                alpha_star_hint: sig9(closed_form_smax(&thetas, config.p).1),
            };
            emit_json(cli, stdout, &report)?;
            if cli.expect_violation && !result.violated {
                return Err(Failure::Expectation(format!("expected a violation, got S = {}", result.s)));
            }
        }
        Command::Maximize { free } => {
            let config = load_topology(cli)?;
            config.ensure_valid()?;
            let thetas = angles(&cli.theta, "theta", Some(config.n))?;
            let (alpha_star, smax) = optimize_alpha_equal(&thetas, config.p);
            let free = if *free {
                let start = match &cli.alpha {
                    Some(_) => angles(&cli.alpha, "alpha", Some(config.p))?,
                    None => vec![std::f64::consts::FRAC_PI_8; config.p],
                };
                let opt = optimize_alpha_free(&config, &thetas, &start)?;
                Some(FreeReport {
                    alphas: opt.alphas.iter().copied().map(sig9).collect(),
                    smax: sig9(opt.smax),
                    converged: opt.converged,
                    sweeps: opt.sweeps,
                })
            } else {
                None
            };
            let violated = is_violation(smax);
            let report = MaximizeReport { alpha_star: sig9(alpha_star), smax: sig9(smax), violated, free };
            emit_json(cli, stdout, &report)?;
            if cli.expect_violation && !violated {
                return Err(Failure::Expectation(format!("expected a violation, got S_max = {smax}")));
            }
        }
        Command::Sweep => {
            let config = load_topology(cli)?;
            let grid = angles(&cli.theta, "theta", None)?;
            let rows = sweep(&config, &grid)?;
            let mut buffer = Vec::new();
            write_sweep_csv(&rows, config.n, &mut buffer)?;
            emit(cli, stdout, &String::from_utf8_lossy(&buffer))?;
        }
        Command::Lhv { alphabet, grid_steps, cap, model } => {
            let config = load_topology(cli)?;
            let options = LhvSearchOptions {
                alphabet_size: *alphabet,
                grid_steps: *grid_steps,
                seed: cli.seed,
                table_cap: *cap,
                ..Default::default()
            };
            let report = lhv_best_s(&config, &options)?;
            if let Some(path) = model {
                fs::write(path, serde_json::to_string_pretty(&report.model).map_err(NetworkError::from)? + "\n")
                    .map_err(NetworkError::from)?;
            }
            emit_json(
                cli,
                stdout,
                &LhvReport {
                    best_s: sig9(report.best_s),
                    grid_best_s: sig9(report.grid_best_s),
                    bound: report.bound,
                    certified: report.certified,
                    tables_enumerated: report.tables_enumerated.to_string(),
                    distinct_patterns: report.distinct_patterns,
                    model: &report.model,
                },
            )?;
        }
    }
    Ok(())
}
