use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use perdde::cli::{cmd_analyze, cmd_oracle, cmd_solve, cmd_verify, Flags, Outcome};

/// Periodic solutions of linear delay differential equations.
#[derive(Parser)]
#[command(name = "perdde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide periodic solvability (exit 0 SOLVABLE, 2 UNSOLVABLE, 3 INCONCLUSIVE).
    Analyze {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the periodic solution.
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Verify a solution file against a problem (exit 4 on failure).
    Verify {
        problem: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare with a method-of-steps RK4 integration (exit 5 if it does not converge).
    Oracle {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Mode window half-width K.
    #[arg(long)]
    truncation: Option<usize>,
    /// Sample count for the CSV export.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random subfamilies drawn by the R-bound estimator.
    #[arg(long)]
    trials: Option<usize>,
    /// Write the document here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Export the solution trajectory as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Solve the unobstructed modes of a singular system.
    #[arg(long)]
    force: bool,
    #[arg(long = "quad-panels")]
    quad_panels: Option<usize>,
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Add a generation timestamp to the document.
    #[arg(long)]
    timestamps: bool,
}

impl Common {
    fn flags(&self) -> Flags {
        Flags {
            truncation: self.truncation,
            samples: self.samples,
            tolerance: self.tolerance,
            seed: self.seed,
            trials: self.trials,
            csv: self.csv.clone(),
            force: self.force,
            quad_panels: self.quad_panels,
            periods: self.periods,
            dt: self.dt,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut outcome, common): (Outcome, &Common) = match &cli.command {
        Command::Analyze { problem, common } => (cmd_analyze(problem, &common.flags()), common),
        Command::Solve { problem, common } => (cmd_solve(problem, &common.flags()), common),
        Command::Verify {
            problem,
            solution,
            common,
        } => (cmd_verify(problem, solution, &common.flags()), common),
        Command::Oracle { problem, common } => (cmd_oracle(problem, &common.flags()), common),
    };
    if common.timestamps {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        outcome.document["generated_at_unix"] = secs.into();
    }
    if let Some(msg) = &outcome.message {
        eprintln!("perdde: {msg}");
    }
    if let Err(e) = outcome.emit(common.output.as_deref()) {
        eprintln!("perdde: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.exit as u8)
}
