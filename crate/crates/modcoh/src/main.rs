use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use modcoh::{parse_spec, run, Flags, ModeChoice, Subcommand, EXIT_INPUT};

#[derive(Debug, Parser)]
#[command(name = "modcoh", version, about = "Coherence checks for panel-distributed Bayesian inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Check the protocol conditions and derive both goals for every panel.
    Check(Args),
    /// Derive the `[[derive]]` goals, or the standard goals when none are listed.
    Derive(Args),
    /// Answer the `[[query]]` d-separation queries against `[graph]`.
    Dsep(Args),
    /// Drop each condition in turn and report which goals stop deriving.
    Ablate(Args),
    /// Compare distributed and joint posteriors for `[model]`.
    Simulate(Args),
    /// Test whether the `[model]` likelihood splits into per-panel factors.
    Separability(Args),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Axiomatic,
    Graphical,
}

#[derive(Debug, clap::Args)]
struct Args {
    /// Spec file (TOML, version "1").
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Grid points per unit-interval block.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Omit proof traces.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, args) = match cli.command {
        Command::Check(a) => (Subcommand::Check, a),
        Command::Derive(a) => (Subcommand::Derive, a),
        Command::Dsep(a) => (Subcommand::Dsep, a),
        Command::Ablate(a) => (Subcommand::Ablate, a),
        Command::Simulate(a) => (Subcommand::Simulate, a),
        Command::Separability(a) => (Subcommand::Separability, a),
    };
    match execute(sub, &args) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("modcoh: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn execute(sub: Subcommand, args: &Args) -> Result<u8, String> {
    if let Some(t) = args.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err("--tolerance must be a finite non-negative number".into());
        }
    }
    let spec = parse_spec(&args.spec).map_err(|e| format!("{}: {e}", args.spec.display()))?;
    let flags = Flags {
        mode: args.mode.map(|m| match m {
            ModeArg::Axiomatic => ModeChoice::Axiomatic,
            ModeArg::Graphical => ModeChoice::Graphical,
        }),
        grid: args.grid,
        seed: args.seed,
        tolerance: args.tolerance,
        quiet: args.quiet,
    };
    let report = run(sub, &spec, &args.spec.display().to_string(), &flags).map_err(|e| e.to_string())?;
    let text = match args.format {
        Format::Human => report.to_human(),
        Format::Machine => report.to_machine(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.outcome.exit_code)
}
