use std::path::PathBuf;
use std::process::ExitCode;

use aggame::commands::{self, Input, SurviveOptions, VerifyOptions};
use aggame::report::Report;
use aggame::CliError;
use aggregation_games::model::DEFAULT_PROFILE_BITS_CAP;
use aggregation_games::negotiation::Selection;
use aggregation_games::suites::{Mutant, DEFAULT_SEED};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aggame", version, about = "Equilibria and pre-vote negotiation in binary aggregation games")]
struct Cli {
    /// Emit tab-separated records instead of tables.
    #[arg(long, global = true)]
    machine: bool,

    /// Largest profile space, in bits (voters times issues).
    #[arg(long, global = true, default_value_t = DEFAULT_PROFILE_BITS_CAP)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate one profile and show acceptors per issue.
    Aggregate {
        #[arg(long)]
        game: PathBuf,
        /// Ballots in voter order, e.g. "101 110 000".
        #[arg(long)]
        profile: Option<String>,
    },
    /// List pure Nash equilibria with coalition flags.
    Nash {
        #[arg(long)]
        game: PathBuf,
        /// Coalition to classify against (repeatable): N, {1,2} or 1,2.
        #[arg(long)]
        coalition: Vec<String>,
    },
    /// Decide which equilibria survive pre-vote negotiation.
    Survive {
        #[arg(long)]
        game: PathBuf,
        /// Check a single profile instead of every equilibrium.
        #[arg(long)]
        profile: Option<String>,
        /// Cross-check with the grid oracle: "default" or amounts like 0,1M,2M,3M.
        #[arg(long)]
        grid: Option<String>,
        /// Equilibrium selection used by the grid oracle.
        #[arg(long, value_enum, default_value_t = SelectionArg::LexSmallest)]
        selection: SelectionArg,
        /// Print the transfer witnesses.
        #[arg(long)]
        witness: bool,
    },
    /// Integrity-constraint analysis of every equilibrium.
    Paradox {
        #[arg(long)]
        game: PathBuf,
    },
    /// Run the randomized property suites.
    Verify {
        /// Also check truthful dominance in this game.
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Instances per suite (defaults differ per suite).
        #[arg(long)]
        count: Option<usize>,
        /// Run only this suite.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, hide = true)]
        mutant: Option<MutantArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    LexSmallest,
    LexLargest,
    Punishing,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutantArg {
    InvertDominance,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let cap = cli.cap;
    match &cli.command {
        Command::Aggregate { game, profile } => commands::aggregate(&Input::load(game, cap)?, profile.as_deref()),
        Command::Nash { game, coalition } => commands::nash(&Input::load(game, cap)?, coalition, cap),
        Command::Survive {
            game,
            profile,
            grid,
            selection,
            witness,
        } => {
            let opts = SurviveOptions {
                profile: profile.clone(),
                grid: grid.clone(),
                selection: match selection {
                    SelectionArg::LexSmallest => Selection::LexSmallest,
                    SelectionArg::LexLargest => Selection::LexLargest,
                    SelectionArg::Punishing => Selection::Punishing,
                },
                witness: *witness,
            };
            commands::survive(&Input::load(game, cap)?, &opts, cap)
        }
        Command::Paradox { game } => commands::paradox(&Input::load(game, cap)?, cap),
        Command::Verify {
            game,
            seed,
            count,
            suite,
            mutant,
        } => {
            let input = game.as_deref().map(|g| Input::load(g, cap)).transpose()?;
            let opts = VerifyOptions {
                seed: *seed,
                count: *count,
                suite: suite.clone(),
                mutant: mutant.map(|MutantArg::InvertDominance| Mutant::InvertDominance),
            };
            commands::verify(input.as_ref(), &opts, cap)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", if cli.machine { report.machine() } else { report.human() });
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
