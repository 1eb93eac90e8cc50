use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sta_dirac::cli::{self, CommandOutcome, Overrides, EXIT_CONFIG};

/// Spacetime-algebra Dirac field: verification, sampling and estimates.
#[derive(Parser)]
#[command(name = "sta-dirac", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to a key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file path (default: <command>.<ext> in the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    /// RNG seed for sample-based commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Screening constant kappa (must satisfy hbar*kappa*c < m*c^2).
    #[arg(long, global = true)]
    kappa: Option<f64>,

    /// Unit system: natural or si.
    #[arg(long, global = true)]
    units: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the governing equations over a seeded sample set.
    Verify,
    /// Evaluate the field over the configured grid.
    Sample,
    /// Export the Klein-Gordon / spin / zitter decomposition over the grid.
    Decompose,
    /// Report the spin angular velocity, size bound and zitter frequency.
    Estimate,
    /// Cross-check the algebra and matrix formulations and the solution family.
    Crosscheck,
}

fn run(args: &Cli) -> sta_dirac::Result<CommandOutcome> {
    let overrides = Overrides {
        out: args.out.clone(),
        format: args.format.clone(),
        seed: args.seed,
        kappa: args.kappa,
        units: args.units.clone(),
    };
    let cfg = cli::load_config(args.config.as_deref(), &overrides)?;
    match args.command {
        Command::Verify => cli::cmd_verify(&cfg),
        Command::Sample => cli::cmd_sample(&cfg),
        Command::Decompose => cli::cmd_decompose(&cfg),
        Command::Estimate => cli::cmd_estimate(&cfg),
        Command::Crosscheck => cli::cmd_crosscheck(&cfg),
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(&args) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            println!("report written to {}", outcome.path.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(err) => {
            // every pre-run failure (bad config, bad params, io) is a usage error
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
