//! Command implementations behind the `nclp` binary.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nclp::diagram::{self, DiagramSpec, PhaseDiagramRow};
use nclp::embed::{bound_from_report, check_p_theta, BoundSource};
use nclp::io::{matrix_to_json, parse_state, parse_superop, MatrixJson};
use nclp::qubit::{find_counterexample, QubitWitness, ScanConfig};
use nclp::tensor::divergence_table;
use nclp::verify::{run_suite, VerifyReport};
use nclp::{build_embedded, classify_region, compatibility, estimate_norm, EstimatorConfig, Region};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Two maps whose action matrices differ by at most this (relative to the
/// larger norm) are treated as equal.
pub const ACTION_EQUALITY_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] nclp::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => EXIT_VERIFY_FAILED,
            _ => EXIT_INVALID,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "nclp", version, about = "Norms of density-weighted maps on Schatten classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a (p, theta) grid and write it as CSV.
    PhaseDiagram(PhaseDiagramArgs),
    /// Estimate the induced norm of the embedded map for a map and a state.
    Norm(NormArgs),
    /// Search the qubit family for a norm exceeding one.
    Counterexample(CounterexampleArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct PhaseDiagramArgs {
    #[arg(long, default_value_t = 1.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_step: f64,
    #[arg(long, default_value_t = 0.05)]
    pub theta_step: f64,
    /// Fill `family_max` for cells with p < 2.
    #[arg(long)]
    pub with_family: bool,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Superoperator JSON file.
    #[arg(long)]
    pub map: PathBuf,
    /// State JSON file.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn read(path: &PathBuf) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit<W: Write>(text: &str, out: &Option<PathBuf>, stdout: &mut W) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn cmd_phase_diagram(args: &PhaseDiagramArgs) -> CliResult<Vec<PhaseDiagramRow>> {
    let spec = DiagramSpec {
        p_min: args.p_min,
        p_max: args.p_max,
        p_step: args.p_step,
        theta_step: args.theta_step,
        with_family: args.with_family,
        ..Default::default()
    };
    Ok(diagram::phase_diagram(&spec)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub lower_bound: f64,
    pub witness: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
    /// Result that justifies `upper_bound` or, without a constant, the
    /// bounded status.
    pub bound_source: BoundSource,
    pub c1: f64,
    pub c_inf: f64,
    pub c_inf_estimated: bool,
    pub cp: bool,
    pub unital: bool,
    pub converged: bool,
    pub p: f64,
    pub theta: f64,
}

fn actions_equal(a: &nclp::SuperOperator, b: &nclp::SuperOperator) -> bool {
    let (x, y) = (a.action_matrix(), b.action_matrix());
    let scale = x.norm().max(y.norm()).max(f64::MIN_POSITIVE);
    (x - y).norm() <= ACTION_EQUALITY_TOL * scale
}

pub fn cmd_norm(args: &NormArgs) -> CliResult<NormReport> {
    let map = parse_superop(&read(&args.map)?)?;
    let state = parse_state(&read(&args.state)?)?;
    check_p_theta(args.p, args.theta)?;
    let (p, theta) = (args.p, args.theta);
    let embedded = build_embedded(&map, &state, p, theta)?;
    let cfg = EstimatorConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..Default::default()
    };
    let estimate = estimate_norm(embedded.action(), p, &cfg)?;
    let report = compatibility(&map, &state)?;
    let cp = report.completely_positive;

    let region = classify_region(p, theta);
    let (upper_bound, bound_source) = if !cp {
        (None, BoundSource::None)
    } else if matches!(region.source, BoundSource::Thm41 | BoundSource::HJXHalf) {
        (Some(bound_from_report(&report, p)), region.source)
    } else if actions_equal(embedded.action(), build_embedded(&map, &state, p, 0.5)?.action()) {
        // The map commutes with the modular weights, so the value at
        // theta = 1/2 is the value here.
        (Some(bound_from_report(&report, p)), BoundSource::HJXHalf)
    } else if region.status == Region::Bounded {
        (None, region.source)
    } else {
        (None, BoundSource::None)
    };

    Ok(NormReport {
        lower_bound: estimate.value,
        witness: matrix_to_json(&estimate.witness),
        upper_bound,
        bound_source,
        c1: report.c1,
        c_inf: report.c_inf,
        c_inf_estimated: report.c_inf_estimated,
        cp,
        unital: report.unital,
        converged: estimate.converged,
        p,
        theta,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub witness: QubitWitness,
    /// Smallest tensor power whose certified lower bound exceeds 10.
    pub rows_to_exceed_10: usize,
}

/// Number of factors needed for `m^n > threshold`, with a margin so the
/// table is long enough despite rounding in the logarithms.
fn rows_needed(m: f64, threshold: f64) -> usize {
    (threshold.ln() / m.ln()).ceil() as usize + 2
}

pub fn cmd_counterexample(args: &CounterexampleArgs) -> CliResult<Option<CounterexampleReport>> {
    if args.p >= 2.0 {
        let region = classify_region(args.p, args.theta);
        return Err(CliError::Invalid(format!(
            "p = {} is classified {} ({}): no counterexample exists for p >= 2",
            args.p,
            region.status.as_str(),
            region.source.as_str()
        )));
    }
    check_p_theta(args.p, args.theta)?;
    let found = find_counterexample(args.p, args.theta, args.tol, &ScanConfig::default())?;
    let Some(witness) = found else {
        return Ok(None);
    };
    let table = divergence_table(witness.m_value, rows_needed(witness.m_value, 10.0))?;
    let rows = table
        .first_exceeding(10.0)
        .ok_or_else(|| CliError::Invalid("divergence table did not exceed 10".into()))?;
    Ok(Some(CounterexampleReport {
        witness,
        rows_to_exceed_10: rows,
    }))
}

pub fn cmd_verify(args: &VerifyArgs) -> VerifyReport {
    run_suite(args.seed)
}

/// Runs a parsed command, writing results to `stdout` unless `--out` is set.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> CliResult<()> {
    match &cli.command {
        Command::PhaseDiagram(args) => {
            let rows = cmd_phase_diagram(args)?;
            emit(&diagram::to_csv_string(&rows), &args.out, stdout)
        }
        Command::Norm(args) => emit(&to_json(&cmd_norm(args)?), &args.out, stdout),
        Command::Counterexample(args) => match cmd_counterexample(args)? {
            Some(report) => emit(&to_json(&report), &args.out, stdout),
            None => emit("none\n", &args.out, stdout),
        },
        Command::Verify(args) => {
            let report = cmd_verify(args);
            emit(&to_json(&report), &args.out, stdout)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
    }
}

/// Applies `NCLP_THREADS` to the global pool when it parses as a positive
/// integer.
pub fn apply_thread_cap(value: Option<&str>) -> Option<usize> {
    let n = value?.trim().parse::<usize>().ok().filter(|&n| n > 0)?;
    nclp::par::init_global_threads(n);
    Some(n)
}
