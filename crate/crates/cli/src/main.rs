//! `piatetski`: reproducible desk-scale experiments on `[p^c] + [m^c] = N`.
//!
//! Exit codes: 0 success, 1 input or computation error, 2 a checked
//! mathematical property failed during the run.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use commands::*;
use output::{write_table, Format};

#[derive(Debug, Parser)]
#[command(name = "piatetski", version, about = "Experiments on [p^c] + [m^c] = N with p prime and m almost prime")]
pub struct Cli {
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Write to a file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    shards: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived pipeline parameters for N and c.
    Params(ParamsArgs),
    /// All representations of one N.
    Solve(SolveArgs),
    /// Minimal-Ω representation for every N in a range.
    Scan(ScanArgs),
    /// Γ and the sieve chain Γ >= Σλ(d)G_d = Γ₀ + Σ₀ - Σ₁.
    Gamma(GammaArgs),
    /// Lower-bound Rosser weights: fundamental inequality and density.
    SieveCheck(SieveCheckArgs),
    /// Export lower-bound Rosser weights as d,lambda rows.
    RosserWeights(RosserWeightsArgs),
    /// Vaaler coefficients and the majorant check.
    Vaaler(VaalerArgs),
    /// Cup coefficients or the partition checks.
    Cups(CupsArgs),
    /// Vaughan split of Σ Λ(n) e(φ(n)) over (P, 2P].
    Vaughan(VaughanArgs),
    /// Weighted exponential sum over (a, b].
    Expsum(ExpsumArgs),
    /// max |H_n| / (P^{c/2} n^{1/2}) over n.
    VdcAudit(VdcAuditArgs),
}

/// Everything a command hands back: its parameters, summary lines for the
/// header, the table, and any failed property checks.
pub struct Report {
    pub params: Value,
    pub summary: Vec<(String, Value)>,
    pub table: output::Table,
    pub violations: Vec<String>,
}

pub fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

/// An input or computation error; maps to exit code 1.
pub struct Failure(pub String);

impl From<piatetski::Error> for Failure {
    fn from(e: piatetski::Error) -> Self {
        Failure(e.to_string())
    }
}

fn run_command(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Params(a) => cmd_params(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Gamma(a) => cmd_gamma(a),
        Command::SieveCheck(a) => cmd_sieve_check(a),
        Command::RosserWeights(a) => cmd_rosser_weights(a),
        Command::Vaaler(a) => cmd_vaaler(a),
        Command::Cups(a) => cmd_cups(a),
        Command::Vaughan(a) => cmd_vaughan(a),
        Command::Expsum(a) => cmd_expsum(a),
        Command::VdcAudit(a) => cmd_vdc_audit(a),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Params(_) => "params",
        Command::Solve(_) => "solve",
        Command::Scan(_) => "scan",
        Command::Gamma(_) => "gamma",
        Command::SieveCheck(_) => "sieve-check",
        Command::RosserWeights(_) => "rosser-weights",
        Command::Vaaler(_) => "vaaler",
        Command::Cups(_) => "cups",
        Command::Vaughan(_) => "vaughan",
        Command::Expsum(_) => "expsum",
        Command::VdcAudit(_) => "vdc-audit",
    }
}

fn emit(cli: &Cli, report: &Report, wall: f64) -> io::Result<()> {
    let mut header: Vec<(String, Value)> = vec![
        ("command".into(), json!(command_name(&cli.command))),
        ("version".into(), json!(piatetski::VERSION)),
    ];
    if let Value::Object(m) = &report.params {
        header.extend(m.iter().map(|(k, v)| (format!("param.{k}"), v.clone())));
    }
    header.extend(report.summary.iter().cloned());
    header.push(("violations".into(), json!(report.violations.len())));
    header.push(("wall_time".into(), json!(format!("{wall:.3}"))));
    match &cli.output {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write_table(&mut w, cli.format, &header, &report.table)?;
            w.flush()
        }
        None => write_table(io::stdout().lock(), cli.format, &header, &report.table),
    }
}

fn main() -> ExitCode {
    let args = match config::merge_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = piatetski::sum::with_shards(cli.shards, || run_command(&cli.command));
    let report = match result {
        Ok(r) => r,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&cli, &report, start.elapsed().as_secs_f64()) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        ExitCode::from(2)
    }
}
