//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed checks or internal errors, 2 bad input
//! (parse errors, shape errors, unknown names), 3 infeasible `C`, 4
//! unsupported combinations and exceeded budgets.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;
use spectral_hull_core::hull::{member_clconv, member_conv_hull, member_via_conv_c, spectral_sup};
use spectral_hull_core::relax::{emit_relaxation, validate_relaxation};
use spectral_hull_core::{Error, SpectralSystem};

use crate::harness::{self, HarnessError, SuiteReport};
use crate::io::{self, IoError};

#[derive(Debug, Parser)]
#[command(name = "spectral-hull", version, about = "Convex hulls of spectral preimages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a point lies in the convex hull of λ⁻¹(C).
    Member {
        /// reorder:N, abs:N, absreorder:N, symeig:N or singval:MxN.
        #[arg(long)]
        system: SpectralSystem,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        point: PathBuf,
        /// Decide membership in the closed hull.
        #[arg(long)]
        closed: bool,
        /// Test λ(x) ∈ ((conv C) ∩ K) + K° instead.
        #[arg(long = "via-convC", alias = "via-conv-c")]
        via_conv_c: bool,
    },
    /// Support function of λ⁻¹(C) in a direction.
    Sup {
        #[arg(long)]
        system: SpectralSystem,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        direction: PathBuf,
    },
    /// Run a property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reproduce one of the worked examples.
    Reproduce {
        /// two_pt, conv_order, cl_nec or sparse_ellipsoid.
        id: String,
    },
    /// Emit the convexified program for a problem description.
    Relax {
        #[arg(long)]
        input: PathBuf,
        /// Write the program here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cross-check the program against the hull engine.
        #[arg(long)]
        validate: bool,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

fn core_code(e: &Error) -> i32 {
    match e {
        Error::DimensionMismatch { .. }
        | Error::NotSymmetric
        | Error::NotPositiveDefinite
        | Error::NotInCone
        | Error::NotInvariant
        | Error::InvalidInput(_) => 2,
        Error::Infeasible => 3,
        Error::Unsupported(_) | Error::Resource(_) => 4,
        Error::IsMember | Error::Numerical(_) => 1,
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(IoError::Invalid { source, .. }) => core_code(source),
            CliError::Io(IoError::Write { .. }) => 1,
            CliError::Io(_) => 2,
            CliError::Core(e) | CliError::Harness(HarnessError::Core(e)) => core_code(e),
            CliError::Harness(_) => 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CommandResult::ok(text)
            } else {
                CommandResult {
                    exit_code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(r) => r,
        Err(e) => CommandResult {
            exit_code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn report_result(report: &SuiteReport) -> CommandResult {
    let mut r = CommandResult::ok(io::to_pretty(report) + "\n");
    if !report.passed() {
        r.exit_code = 1;
        r.stderr = format!(
            "{}: {} failure(s) in {} trial(s)\n",
            report.suite_name,
            report.failures.len(),
            report.trials
        );
    }
    r
}

fn execute(cmd: Command) -> Result<CommandResult, CliError> {
    match cmd {
        Command::Member {
            system,
            set,
            point,
            closed,
            via_conv_c,
        } => {
            let c = io::read_set(&set)?;
            let x = io::read_point(&system, &point)?;
            let out = if via_conv_c {
                json!({ "verdict": member_via_conv_c(&system, &c, &x)?, "test": "via_convC" })
            } else if closed {
                serde_json::to_value(member_clconv(&system, &c, &x)?).expect("serializable")
            } else {
                serde_json::to_value(member_conv_hull(&system, &c, &x)?).expect("serializable")
            };
            Ok(CommandResult::ok(io::to_pretty(&out) + "\n"))
        }
        Command::Sup {
            system,
            set,
            direction,
        } => {
            let c = io::read_set(&set)?;
            let dir = io::read_point(&system, &direction)?;
            let sup = spectral_sup(&system, &dir, &c)?;
            Ok(CommandResult::ok(io::to_pretty(&sup) + "\n"))
        }
        Command::Check {
            suite,
            trials,
            seed,
        } => Ok(report_result(&harness::run_suite(&suite, trials, seed)?)),
        Command::Reproduce { id } => Ok(report_result(&harness::reproduce(&id)?)),
        Command::Relax {
            input,
            out,
            validate,
            samples,
            seed,
        } => {
            let problem = io::read_problem(&input)?;
            let spec = emit_relaxation(&problem)?;
            let mut result = match &out {
                Some(path) => {
                    io::write_json(path, &spec)?;
                    CommandResult::ok(
                        io::to_pretty(&json!({ "written": path, "rows": spec.rows.len() })) + "\n",
                    )
                }
                None => CommandResult::ok(io::to_pretty(&spec) + "\n"),
            };
            if validate {
                let rep = validate_relaxation(&spec, samples, seed)?;
                result.stderr = format!(
                    "validation: {} checked, {} skipped near the boundary, {} disagreement(s)\n",
                    rep.checked, rep.skipped_boundary, rep.disagreements
                );
                if out.is_some() {
                    result.stdout = io::to_pretty(&rep) + "\n";
                }
                if rep.disagreements > 0 {
                    result.exit_code = 1;
                }
            }
            Ok(result)
        }
    }
}
