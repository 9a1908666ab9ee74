use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dfi_cli::commands::{self, exit, CliError, CliResult, DemoName, Outcome, Settings};
use dfi_cli::table;

/// Solve, dualize and verify discretized higher-order differential inclusions.
///
/// Exit codes: 0 optimal or verified, 2 infeasible, 3 unbounded, 4 parse
/// error, 5 verification failure, 1 anything else.
#[derive(Parser)]
#[command(name = "dfi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance for inclusion, argmaximum and transversality checks.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the transcription and report the trajectory and certificate.
    Solve { problem: PathBuf },
    /// Compare the primal optimum with the dual functional at the extracted certificate.
    Gap { problem: PathBuf },
    /// Check a trajectory and certificate against the optimality conditions.
    ///
    /// Both files may be bare objects or reports written by `solve`.
    Verify {
        problem: PathBuf,
        primal: PathBuf,
        certificate: PathBuf,
    },
    /// Evaluate the dual functional term by term.
    Dual {
        problem: PathBuf,
        /// Certificate to evaluate; defaults to the one extracted from the solve.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Write a built-in instance and run solve, gap and verify on it.
    Demo {
        #[arg(value_enum)]
        name: DemoArg,
        /// Where to write the instance (default: <name>.json).
        #[arg(long)]
        problem_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoArg {
    Decay,
    Ptl,
    Pfc,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::other)
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let settings = Settings { tol: cli.tol };
    match &cli.command {
        Command::Solve { problem } => commands::solve(&read(problem)?, &settings),
        Command::Gap { problem } => commands::gap(&read(problem)?, &settings),
        Command::Verify {
            problem,
            primal,
            certificate,
        } => commands::verify_files(
            &read(problem)?,
            &read(primal)?,
            &read(certificate)?,
            &settings,
        ),
        Command::Dual { problem, cert } => {
            let cert = cert.as_deref().map(read).transpose()?;
            commands::dual(&read(problem)?, cert.as_deref(), &settings)
        }
        Command::Demo { name, problem_out } => {
            let (name, file) = match name {
                DemoArg::Decay => (DemoName::Decay, "decay.json"),
                DemoArg::Ptl => (DemoName::Ptl, "ptl.json"),
                DemoArg::Pfc => (DemoName::Pfc, "pfc.json"),
            };
            let (doc, outcome) = commands::demo(name, &settings)?;
            let path = problem_out.clone().unwrap_or_else(|| PathBuf::from(file));
            fs::write(&path, doc.to_json())
                .with_context(|| format!("writing {}", path.display()))
                .map_err(CliError::other)?;
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::FAILURE
            } else {
                exit::OK
            });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let json = outcome.report.to_json();
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &json) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(exit::FAILURE);
                }
            }
            match cli.format {
                Format::Json => println!("{json}"),
                Format::Table => print!("{}", table::render(&outcome.report)),
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
