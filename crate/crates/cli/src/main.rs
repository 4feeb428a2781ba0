use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qswitch_cli::config::ScenarioConfig;
use qswitch_cli::figures::{self, FigureId};
use qswitch_cli::table::Table;
use qswitch_cli::verify::{run_verify, Level, Mutation, VerifyOptions};
use qswitch_cli::{minimize, sweep, CliError, BASELINE_DIR};

#[derive(Parser)]
#[command(
    name = "qswitch",
    version,
    about = "Quantum switch energetics: sweeps, searches and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a config over its sweep grid.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize over U(2) pairs.
    Minimize {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = BASELINE_DIR)]
        baselines: PathBuf,
        #[arg(long, value_enum, default_value_t = MutationArg::None, hide = true)]
        mutate: MutationArg,
    },
    /// Write the dataset of one figure (fig1 to fig9).
    Figure {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    None,
    ChiSign,
}

fn write_table(table: &Table, out: Option<&Path>) -> qswitch_cli::Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            table.write(&mut w)?;
            w.flush().map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => table.write(io::stdout().lock()),
    }
}

fn run(cli: Cli) -> qswitch_cli::Result<ExitCode> {
    match cli.command {
        Command::Sweep { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            write_table(&sweep::run_sweep(&cfg)?, out.as_deref())?;
        }
        Command::Minimize { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            write_table(&minimize::run_minimize(&cfg)?, out.as_deref())?;
        }
        Command::Verify {
            level,
            seed,
            baselines,
            mutate,
        } => {
            let opts = VerifyOptions {
                level: match level {
                    LevelArg::Quick => Level::Quick,
                    LevelArg::Full => Level::Full,
                },
                seed,
                mutation: match mutate {
                    MutationArg::None => Mutation::None,
                    MutationArg::ChiSign => Mutation::ChiSign,
                },
                baselines: &baselines,
            };
            let results = run_verify(&opts);
            for r in &results {
                println!("{r}");
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Figure { id, out } => {
            let id: FigureId = id.parse()?;
            write_table(&figures::emit(id)?, out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
