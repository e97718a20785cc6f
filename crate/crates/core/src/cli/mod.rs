//! Command-line front end.
//!
//! Exit codes: 0 success, 1 tolerance or verification failure, 2 bad
//! configuration, 3 numerical failure.

mod commands;
pub mod config;
pub mod table;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
pub use config::{Format, GridSpec, Run, RunConfig, Spacing, Tolerances};
pub use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "jcflow", version, about = "Wegner flow of the Jaynes-Cummings model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; stdout when absent and the config names none.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Override the prepared photon number.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form spectrum against a dense eigensolver.
    Spectrum,
    /// Block flow equations, numeric and closed form.
    Flow,
    /// Entanglement entropy along the flow, optionally in time.
    Entropy,
    /// Completeness and unitality of the Kraus sets.
    Povm,
    /// First-order unitary and Ramsey identities.
    Approx,
    /// Run every invariant check.
    Verify,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::InvalidConfig(_) | Error::Index { .. } | Error::Phase { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ToleranceFailure,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::ToleranceFailure
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::ToleranceFailure => 1,
        }
    }
}

/// Options that apply on top of the loaded configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub n: Option<usize>,
    pub bits: bool,
}

/// Where a command sends its table and its human-readable report.
pub struct Sink<'a> {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub report: &'a mut dyn Write,
}

impl Sink<'_> {
    pub fn emit(&mut self, table: &Table) -> Result<(), CliError> {
        match &self.output {
            Some(path) => {
                let f =
                    File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
                let mut w = BufWriter::new(f);
                table.write_to(&mut w, self.format)?;
                w.flush().map_err(|e| CliError::Io(e.to_string()))
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                table.write_to(&mut lock, self.format)
            }
        }
    }

    pub fn line(&mut self, text: &str) {
        let _ = writeln!(self.report, "{text}");
    }
}

/// Runs one command on a validated configuration. The report stream gets
/// warnings, summaries and PASS/FAIL lines.
pub fn execute(command: Command, run: &mut Run, ov: &Overrides, report: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Some(n) = ov.n {
        run.cfg.n_state = n;
    }
    let mut sink = Sink {
        format: ov.format.or(run.cfg.format).unwrap_or(Format::Csv),
        output: ov.output.clone().or_else(|| run.cfg.output.clone()),
        report,
    };
    match command {
        Command::Spectrum => commands::spectrum(run, &mut sink),
        Command::Flow => commands::flow(run, &mut sink),
        Command::Entropy => commands::entropy(run, &mut sink, ov.bits),
        Command::Povm => commands::povm(run, &mut sink),
        Command::Approx => commands::approx(run, &mut sink),
        Command::Verify => verify::verify(run, &mut sink),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let Some(path) = cli.config.clone() else {
        eprintln!("error: --config is required");
        return 2;
    };
    let ov = Overrides { output: cli.output.clone(), format: cli.format, n: cli.n, bits: cli.bits };
    let result = Run::load(&path).and_then(|mut run| {
        let stdout = io::stdout();
        // verify writes PASS/FAIL lines to stdout; other commands keep stdout
        // for the table and report on stderr
        if cli.command == Command::Verify {
            execute(cli.command, &mut run, &ov, &mut stdout.lock())
        } else {
            execute(cli.command, &mut run, &ov, &mut io::stderr())
        }
    });
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
