use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use af2m::commands::{self, CommandOutcome, EXIT_USAGE};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "af2m", version, about = "Proof checker and evaluator for second-order logic with Mendler-style fixed points")]
struct Cli {
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Reduction fuel (steps) for evaluation and assertions.
    #[arg(long, global = true)]
    fuel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check theorems and reduction assertions in `.af2` files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Normalize a proof term in the scope of a file.
    Eval { file: PathBuf, term: String },
    /// Certify strong normalization of a proof term, or find a reduction cycle.
    Sn {
        file: PathBuf,
        term: String,
        /// Distinct terms the reduction-graph oracle may visit.
        #[arg(long, default_value_t = af2m_core::reduction::DEFAULT_ORACLE_BUDGET)]
        budget: usize,
    },
    /// Test the fixed-point principles on random finite lattices.
    LatticeFuzz {
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also try every operator on every lattice up to this size.
        #[arg(long, default_value_t = 0)]
        exhaustive: usize,
    },
    /// Check the bundled corpus, with normalization verdicts for every theorem.
    Corpus,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let out: CommandOutcome = match &cli.command {
        Command::Check { files } => commands::check(files, cli.fuel),
        Command::Eval { file, term } => commands::eval(file, term, cli.fuel),
        Command::Sn { file, term, budget } => commands::sn(file, term, cli.fuel, *budget),
        Command::LatticeFuzz { size, trials, seed, exhaustive } => {
            commands::lattice_fuzz(*size, *trials, *seed, *exhaustive)
        }
        Command::Corpus => commands::corpus(cli.fuel),
    };
    // Write errors (a closed pipe) are ignored: the exit code still stands.
    if cli.json {
        let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
    } else if out.code == EXIT_USAGE {
        let _ = writeln!(std::io::stderr(), "{}", out.text);
    } else {
        let _ = writeln!(std::io::stdout(), "{}", out.text);
    }
    ExitCode::from(out.code as u8)
}
