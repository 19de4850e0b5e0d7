//! `flatlab`: reproducible reports on flat polynomials, Barker sequences,
//! Morse sequences and arithmetic sieves.
//!
//! Each subcommand writes `<command>.json` (and `<command>.csv` with
//! `--format csv`) plus `<command>.manifest.json` into `--out DIR`.
//! Exit codes: 0 success, 1 I/O failure or failed identity check,
//! 2 invalid input, 3 resource cap refusal.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flatlab::flat_scan::Objective;
use flatlab::numtheory::{Arithmetic, MomentModel};
use flatlab::FlatError;
use thiserror::Error;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "flatlab", version, about = "Numerical laboratory for flat Littlewood polynomials")]
pub struct Cli {
    /// Worker threads for parallel searches and trials
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write tabular data as CSV
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// L^alpha norms and flatness statistics of one polynomial
    Norms(NormsArgs),
    /// Grid residuals of the sign/0-1 correspondence identities
    IdentityCheck(IdentityArgs),
    /// Aperiodic autocorrelations and merit factor
    Autocorr(SeqArgs),
    /// Residue counts of an integer set and their DFT
    Setdft(SetDftArgs),
    /// Lagged correlations against the 3/sqrt(N) band
    Independence(IndependenceArgs),
    /// Exhaustive Barker search for one length
    Barker(BarkerArgs),
    /// Flatness along generalized Morse sequences
    Morse(MorseArgs),
    /// Liouville and Moebius tables written to a binary file
    Sieve(SieveArgs),
    /// Partial sums of mu or lambda against x^(1/2+eps)
    RhScan(RhScanArgs),
    /// Averages of products of shifted Liouville values
    Chowla(ChowlaArgs),
    /// Monte-Carlo moments of random and Liouville polynomials
    Moments(MomentsArgs),
    /// Correlations, spectral check and periodogram
    Spectrum(SpectrumArgs),
    /// Smallest sidelobe energy over all sign sequences of one length
    FlatScan(FlatScanArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutDir {
    /// Directory for reports and manifest
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

/// Exactly one sequence source.
#[derive(Args, Debug, Clone, Default)]
pub struct SeqSource {
    /// Sequence as a +/- or 0/1 string
    #[arg(long)]
    seq: Option<String>,
    /// File with a +/- or 0/1 sequence; whitespace and commas are ignored
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Packed bitset file (8-byte count, then bits LSB-first); bit 1 is +1
    #[arg(long, value_name = "FILE")]
    bitset: Option<PathBuf>,
    /// Seeded random sign sequence of this length
    #[arg(long, value_name = "LEN", value_parser = parse_count)]
    random: Option<usize>,
    /// Thue-Morse sign prefix of this length
    #[arg(long, value_name = "LEN", value_parser = parse_count)]
    thue_morse: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SeqArgs {
    #[command(flatten)]
    source: SeqSource,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct NormsArgs {
    #[command(flatten)]
    source: SeqSource,
    /// Exponents; 2 and 4 are exact, others use a refined grid
    #[arg(long, value_delimiter = ',', default_value = "4")]
    alpha: Vec<f64>,
    /// Use mu or lambda coefficients f(1..=N) instead of a sequence
    #[arg(long)]
    arith: Option<Arithmetic>,
    /// Degree bound N for --arith
    #[arg(long, value_parser = parse_count)]
    n: Option<usize>,
    /// Sieve table for --arith; sieved on the fly when absent
    #[arg(long)]
    table: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[command(flatten)]
    source: SeqSource,
    /// Number of random sequences with --random (first and last signs forced to +)
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Grid size for the decomposition and differenced identities
    #[arg(long)]
    grid: Option<usize>,
    /// Shift for the differenced identity
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct SetDftArgs {
    /// Comma-separated integers
    #[arg(long, allow_hyphen_values = true)]
    set: String,
    /// Modulus
    #[arg(long)]
    r: usize,
    /// Subtract #A from every residue count
    #[arg(long)]
    balanced: bool,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct IndependenceArgs {
    #[command(flatten)]
    source: SeqSource,
    #[arg(long, default_value_t = 32)]
    max_lag: usize,
    /// Window N; defaults to the sequence length
    #[arg(long, value_parser = parse_count)]
    window: Option<usize>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct BarkerArgs {
    #[arg(long, value_parser = parse_count)]
    n: usize,
    /// Cut branches whose partial sidelobes already exceed 1
    #[arg(long)]
    prune: bool,
    #[arg(long, default_value_t = flatlab::barker::DEFAULT_CAP)]
    cap: usize,
    /// Resume file, updated after every batch of subtrees
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct MorseArgs {
    /// Comma-separated sign strings, e.g. "+-,+-,+-"
    #[arg(long)]
    factors: String,
    #[arg(long, value_delimiter = ',', required = true)]
    lengths: Vec<usize>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct SieveArgs {
    /// Bound N; scientific notation such as 1e7 is accepted
    #[arg(long, value_parser = parse_count)]
    n: usize,
    /// Table file; report and manifest are written next to it
    #[arg(long, value_name = "FILE", default_value = "sieve.bin")]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TableSource {
    /// Sieve table written by `flatlab sieve`
    #[arg(long, default_value = "sieve.bin")]
    table: PathBuf,
    /// Sieve to this bound instead of reading a table
    #[arg(long, value_parser = parse_count)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RhScanArgs {
    #[command(flatten)]
    table: TableSource,
    #[arg(long, default_value = "mu")]
    which: Arithmetic,
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct ChowlaArgs {
    #[command(flatten)]
    table: TableSource,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    offsets: Vec<usize>,
    /// Window N; defaults to the largest that fits the table
    #[arg(long, value_parser = parse_count)]
    window: Option<usize>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long, default_value = "random-sign")]
    model: MomentModel,
    /// Polynomial length N
    #[arg(long, value_parser = parse_count, default_value = "4096")]
    n: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    p: u32,
    /// Sieve table for the lambda-shifted model
    #[arg(long, default_value = "sieve.bin")]
    table: PathBuf,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    source: SeqSource,
    #[arg(long, default_value_t = 64)]
    lags: usize,
    /// Periodogram grid size; at least the sequence length
    #[arg(long, value_parser = parse_count)]
    grid: Option<usize>,
    /// Two-column CSV (frequency, power) of the periodogram
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
pub struct FlatScanArgs {
    #[arg(long, value_parser = parse_count)]
    n: usize,
    #[arg(long, default_value = "min-l4")]
    objective: Objective,
    /// Energy evaluations for the stochastic search above the cap
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    #[arg(long, default_value_t = flatlab::flat_scan::EXHAUSTIVE_CAP)]
    cap: usize,
    #[command(flatten)]
    out: OutDir,
}

/// Nonnegative integer, also in forms like `1e7` or `2.5e3`.
pub fn parse_count(text: &str) -> std::result::Result<usize, String> {
    if let Ok(v) = text.parse::<usize>() {
        return Ok(v);
    }
    let v: f64 = text.parse().map_err(|_| format!("'{text}' is not a count"))?;
    if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 9.007_199_254_740_992e15) {
        return Err(format!("'{text}' is not a nonnegative integer"));
    }
    Ok(v as usize)
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} identity checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Flat(e) if e.is_resource_cap() => 3,
            CliError::Flat(FlatError::Io(_)) => 1,
            CliError::Flat(_) | CliError::Usage(_) => 2,
            CliError::ChecksFailed { .. } => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
