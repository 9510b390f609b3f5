use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slabfront::{load, run_scenario, RunOptions, Status};

#[derive(Parser)]
#[command(name = "slabfront", about = "Transmission and causality diagnostics for a dispersive slab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run {
        scenario: PathBuf,
        /// Output directory, overriding the scenario's.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the verbatim textbook transmission formula for the spectrum.
        #[arg(long = "literal-eq17")]
        literal_eq17: bool,
        /// Worker threads for per-frequency sampling.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Also write SVG plots.
        #[arg(long)]
        plots: bool,
    },
    /// Check a scenario file and print the resolved configuration.
    Validate { scenario: PathBuf },
    /// Print the version.
    Version,
}

const EXIT_INVALID: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("slabfront {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => match load(&scenario) {
            Ok(sc) => {
                println!("{}", serde_json::to_string_pretty(&sc).expect("scenario serialises"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::Run { scenario, out, literal_eq17, threads, plots } => {
            let sc = match load(&scenario) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            if threads == 0 {
                eprintln!("error: --threads must be at least 1");
                return ExitCode::from(EXIT_INVALID);
            }
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let opts = RunOptions { out, literal_eq17, plots };
            match pool.install(|| run_scenario(&sc, &opts)) {
                Ok(o) => {
                    let r = &o.report;
                    for f in &r.guard_failures {
                        eprintln!("guard {} failed in {}: {}", f.guard, f.analysis, f.message);
                    }
                    if let Some(v) = r.verdict {
                        println!("verdict: {}", serde_json::to_value(v).unwrap().as_str().unwrap_or("?"));
                    }
                    println!("wrote {} artifacts to {}", r.artifacts.len(), o.dir.display());
                    match r.status {
                        Status::Ok => ExitCode::SUCCESS,
                        s => ExitCode::from(s.exit_code() as u8),
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
