//! `rwb`: command-line front end for the regular-logic workbench.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rwb::chase::DEFAULT_BUDGET;
use rwb::harness::commands::{self, error_code, exit, CommandOutput};
use rwb::harness::VerifyConfig;

#[derive(Parser)]
#[command(
    name = "rwb",
    version,
    about = "Chase, entailment, model enumeration and property suites for regular theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the JSON document to this file.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the universal model of a formula.
    Chase {
        /// A `.rth` file or the name of a built-in theory.
        #[arg(long)]
        theory: String,
        /// A formula in context, e.g. `[x:A, y:A] R(x, y)`.
        #[arg(long)]
        formula: String,
        #[arg(long, env = "RWB_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Decide a sequent `[ctx] φ |- ψ`.
    Entail {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        sequent: String,
        #[arg(long, env = "RWB_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Enumerate models up to isomorphism.
    Models {
        #[arg(long)]
        theory: String,
        /// Elements per sort.
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
    /// Compare dj-preserving and continuous maps on filter spaces.
    Stone {
        /// Largest semilattice to enumerate.
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        /// A single semilattice as `{"order": [[0|1, ...], ...]}`.
        #[arg(long, value_name = "FILE")]
        semilattice: Option<PathBuf>,
    },
    /// Run property suites and report.
    Verify {
        /// Restrict to one theory instead of the built-in corpus.
        #[arg(long)]
        theory: Option<String>,
        /// `all`, or a comma-separated list of suite ids.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest semilattice for the `stone` suite.
        #[arg(long)]
        max_size: Option<usize>,
        /// Most stages per generated diagram.
        #[arg(long)]
        stages: Option<usize>,
        /// Most elements per sort in a diagram stage.
        #[arg(long)]
        model_size: Option<usize>,
        #[arg(long, env = "RWB_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

fn run(cli: Cli) -> Result<CommandOutput, rwb::harness::HarnessError> {
    match cli.command {
        Command::Chase { theory, formula, budget } => commands::cmd_chase(&theory, &formula, budget),
        Command::Entail { theory, sequent, budget } => commands::cmd_entail(&theory, &sequent, budget),
        Command::Models { theory, max_size } => commands::cmd_models(&theory, max_size),
        Command::Stone { max_size, semilattice } => {
            let text = semilattice
                .map(|p| {
                    std::fs::read_to_string(&p)
                        .map_err(|e| rwb::harness::HarnessError::Input(format!("{}: {e}", p.display())))
                })
                .transpose()?;
            commands::cmd_stone(max_size, text.as_deref())
        }
        Command::Verify { theory, suite, seed, max_size, stages, model_size, budget } => {
            let d = VerifyConfig::default();
            let config = VerifyConfig {
                seed,
                max_size: max_size.unwrap_or(d.max_size),
                stages: stages.unwrap_or(d.stages),
                model_size: model_size.unwrap_or(d.model_size),
                budget,
                ..d
            };
            commands::cmd_verify(theory.as_deref(), &suite, config).map(|(_, out)| out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_path = cli.json.clone();
    let out = match run(cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e) as u8);
        }
    };
    print!("{}", out.text);
    if let Some(path) = json_path {
        let doc = serde_json::to_string_pretty(&out.json).expect("JSON values serialise");
        if let Err(e) = std::fs::write(&path, doc + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(exit::PARSE as u8);
        }
    }
    ExitCode::from(out.code as u8)
}
