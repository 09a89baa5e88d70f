//! Command-line front end for the `lm05-core` analysis library: key-rate
//! curves, protocol comparisons, Monte-Carlo runs and a validation report,
//! all written as CSV or plain text.

pub mod analysis;
pub mod commands;
pub mod csv;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lm05_core::channels::{CorrelationMode, NoiseKind};
use lm05_core::montecarlo::{NoiseSpec, DEFAULT_CHECK_PROB};

pub use csv::{format_number, Cell, CsvTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Argument(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<lm05_core::Error> for CliError {
    fn from(e: lm05_core::Error) -> Self {
        match e {
            lm05_core::Error::Argument(_) | lm05_core::Error::Unsupported(_) => {
                CliError::Argument(e.to_string())
            }
            lm05_core::Error::Numerical(_) | lm05_core::Error::Consistency(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lm05", version, about = "Key-rate analysis of the d-dimensional LM05 protocol")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key rates under the equiangular cloning attack.
    Individual(IndividualArgs),
    /// Key rates under collective attacks hidden in channel noise.
    Collective(CollectiveArgs),
    /// Two rounds of the d-dimensional protocol against one d²-dimensional round.
    Compare(CompareArgs),
    /// Simulate protocol rounds and compare frequencies with closed forms.
    Montecarlo(MonteCarloArgs),
    /// Run the invariant checks and print a pass/fail report.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct IndividualArgs {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,7")]
    pub dims: Vec<usize>,
    /// Number of θ values on [0, π/2].
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Dimensions for the detection-threshold table.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
    pub threshold_dims: Vec<usize>,
    /// Output file for the key-rate table (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output file for the threshold table (appended to stdout if omitted).
    #[arg(long)]
    pub threshold_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Number of noise values.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
}

#[derive(Debug, Args)]
pub struct CollectiveArgs {
    /// Noise channel: dep, dpf or adc.
    #[arg(long, value_parser = parse_kind)]
    pub kind: NoiseKind,
    /// Noise correlation between the two channel uses: ind or cor.
    #[arg(long, value_parser = parse_mode, default_value = "ind")]
    pub mode: CorrelationMode,
    #[arg(long, value_delimiter = ',', default_value = "3,5,8,10")]
    pub dims: Vec<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: NoiseKind,
    #[arg(long, value_parser = parse_mode, default_value = "ind")]
    pub mode: CorrelationMode,
    /// Base dimension d (the second protocol uses d²).
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 100_000)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Channel noise as kind:mode:p, e.g. dep:ind:0.3.
    #[arg(long, value_parser = parse_noise, conflicts_with = "cloning", required_unless_present = "cloning")]
    pub noise: Option<NoiseSpec>,
    /// Equiangular cloning attack with this overlap angle in radians.
    #[arg(long)]
    pub cloning: Option<f64>,
    /// Probability that Alice runs a check round.
    #[arg(long, default_value_t = DEFAULT_CHECK_PROB)]
    pub check_prob: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Seed for the random states used by the encoding check.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_kind(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: lm05_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<CorrelationMode, String> {
    s.parse().map_err(|e: lm05_core::Error| e.to_string())
}

/// Parses `kind:mode:p`.
pub fn parse_noise(s: &str) -> Result<NoiseSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, mode, p] = parts.as_slice() else {
        return Err(format!("expected kind:mode:p, got '{s}'"));
    };
    let p: f64 = p.parse().map_err(|_| format!("invalid noise strength '{p}'"))?;
    Ok(NoiseSpec {
        kind: parse_kind(kind)?,
        mode: parse_mode(mode)?,
        p,
    })
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Individual(a) => {
            let (rates, thresholds) = commands::cmd_individual(&a.dims, a.points, &a.threshold_dims)?;
            emit(&a.out, &rates.to_csv(), stdout)?;
            match &a.threshold_out {
                Some(_) => emit(&a.threshold_out, &thresholds.to_csv(), stdout)?,
                None => {
                    let sep = if a.out.is_none() { "\n" } else { "" };
                    emit(&None, &format!("{sep}{}", thresholds.to_csv()), stdout)?
                }
            }
        }
        Command::Collective(a) => {
            let grid = commands::p_grid(a.grid.p_min, a.grid.p_max, a.grid.points)?;
            let table = commands::cmd_collective(a.kind, a.mode, &a.dims, &grid)?;
            emit(&a.out, &table.to_csv(), stdout)?;
        }
        Command::Compare(a) => {
            let grid = commands::p_grid(a.grid.p_min, a.grid.p_max, a.grid.points)?;
            let table = commands::cmd_compare(a.kind, a.mode, a.d, &grid)?;
            emit(&a.out, &table.to_csv(), stdout)?;
        }
        Command::Montecarlo(a) => {
            let config = commands::sim_config(a.d, a.rounds, a.check_prob, a.seed, a.noise, a.cloning)?;
            let report = commands::cmd_montecarlo(&config)?;
            emit(&a.out, &report.to_csv(), stdout)?;
            let _ = writeln!(stderr, "{}", report.summary_line());
            for c in report.comparisons.iter().filter(|c| !c.within) {
                let _ = writeln!(
                    stderr,
                    "outside 4 sigma: {} ({}) estimate {} target {}",
                    c.quantity,
                    c.basis,
                    format_number(c.estimate),
                    format_number(c.target)
                );
            }
        }
        Command::Validate(a) => {
            let report = validate::run_validation(a.seed);
            stdout
                .write_all(report.render().as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            return Ok(if report.all_passed() { 0 } else { 2 });
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
