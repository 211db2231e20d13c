use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcorr_cli::report::Payload;
use qcorr_cli::runner::{self, RunOutcome};
use qcorr_cli::scenario::{Format, Scenario};
use qcorr_cli::{CliError, EXIT_ERROR, EXIT_OK, EXIT_VIOLATION};

/// Entropy-based correlation toolkit: partitions, invariants, entanglement
/// swapping, and the two-atom cavity exchange protocol.
#[derive(Parser)]
#[command(name = "qcorr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Subset entropies of a state.
    Entropy(RunArgs),
    /// Full correlation census of a state, with an optional block query.
    Correlations(RunArgs),
    /// Evolve under an embedded Hamiltonian, recording all quantities.
    Evolve(RunArgs),
    /// Random-unitary invariance sweep on an interacting subset.
    Invariants(RunArgs),
    /// Bell-measurement entanglement swapping of two entangled pairs.
    Swap(RunArgs),
    /// Two-atom cavity exchange protocol.
    Jcm(RunArgs),
    /// Swap-bound sweep over an (a^2, c^2) grid.
    Sweep(RunArgs),
    /// Run the built-in verification suite.
    Selftest(OutputArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format (default: the scenario's `format` field, else csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn emit(
    outcome: &RunOutcome,
    args: &OutputArgs,
    file_format: Option<Format>,
) -> Result<(), CliError> {
    let format = args.format.or(file_format).unwrap_or(Format::Csv);
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(CliError::Io)?;
            outcome.report.write_to(format, file)?;
        }
        None => {
            let stdout = std::io::stdout().lock();
            outcome.report.write_to(format, stdout)?;
        }
    }
    Ok(())
}

fn run(kind: &'static str, args: &RunArgs) -> Result<RunOutcome, CliError> {
    let (scenario, file_format) = Scenario::load(&args.scenario, args.seed)?;
    if scenario.kind() != kind {
        return Err(CliError::Validation(format!(
            "scenario kind `{}` does not match subcommand `{kind}`",
            scenario.kind()
        )));
    }
    let outcome = runner::run_scenario(&scenario)?;
    emit(&outcome, &args.output, file_format)?;
    Ok(outcome)
}

fn finish(outcome: RunOutcome) -> ExitCode {
    if outcome.violations.is_empty() {
        ExitCode::from(EXIT_OK as u8)
    } else {
        for violation in &outcome.violations {
            eprintln!("property violation: {violation}");
        }
        ExitCode::from(EXIT_VIOLATION as u8)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Entropy(args) => run("entropy", args),
        Command::Correlations(args) => run("correlations", args),
        Command::Evolve(args) => run("evolve", args),
        Command::Invariants(args) => run("invariants", args),
        Command::Swap(args) => run("swap", args),
        Command::Jcm(args) => run("jcm", args),
        Command::Sweep(args) => run("sweep", args),
        Command::Selftest(output) => {
            let outcome = runner::run_selftest();
            if let Payload::Selftest { criteria, .. } = &outcome.report.payload {
                for row in criteria {
                    println!(
                        "{} criterion {:2} {}: {}",
                        if row.passed { "PASS" } else { "FAIL" },
                        row.id,
                        row.name,
                        row.detail
                    );
                }
            }
            // The pass/fail lines go to stdout; the machine-readable report
            // is written only when a destination is named.
            let write_result = if output.out.is_some() {
                emit(&outcome, output, None)
            } else {
                Ok(())
            };
            match write_result {
                Ok(()) => Ok(outcome),
                Err(e) => Err(e),
            }
        }
    };
    match result {
        Ok(outcome) => finish(outcome),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
