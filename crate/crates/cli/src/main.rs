use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use gselab_cli::commands::Options;
use gselab_cli::{load, run, CliError, Command};

#[derive(Parser)]
#[command(name = "gselab", version, about = "Generalized Schrödinger dynamics: scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Output root; each scenario writes into `<out>/<name>/`.
    #[arg(long, short, global = true, default_value = "out")]
    out: PathBuf,
    /// Also write long-format plotting tables (density, centroids, orbits).
    #[arg(long, global = true)]
    emit_plot_data: bool,
    /// Cap on worker threads for scenario batches and λ sweeps.
    #[arg(long, global = true, env = "GSELAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical operator of the scenario Hamiltonian.
    Quantize { configs: Vec<PathBuf> },
    /// Propagate the generalized Schrödinger equation on the grid.
    Evolve { configs: Vec<PathBuf> },
    /// Closed-form λ = 0 solution from the classical flow.
    ClosedForm { configs: Vec<PathBuf> },
    /// Grid propagation against the closed form, with error series.
    Compare { configs: Vec<PathBuf> },
    /// Loop action, geometric phase and Bohr–Sommerfeld tables.
    Phase { configs: Vec<PathBuf> },
    /// Lyapunov exponent and wavefunction divergence.
    Chaos { configs: Vec<PathBuf> },
    /// Energy and dynamics as functions of λ.
    SweepLambda { configs: Vec<PathBuf> },
}

impl Cmd {
    fn split(self) -> (Command, Vec<PathBuf>) {
        match self {
            Cmd::Quantize { configs } => (Command::Quantize, configs),
            Cmd::Evolve { configs } => (Command::Evolve, configs),
            Cmd::ClosedForm { configs } => (Command::ClosedForm, configs),
            Cmd::Compare { configs } => (Command::Compare, configs),
            Cmd::Phase { configs } => (Command::Phase, configs),
            Cmd::Chaos { configs } => (Command::Chaos, configs),
            Cmd::SweepLambda { configs } => (Command::SweepLambda, configs),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let (command, configs) = cli.command.split();
    if configs.is_empty() {
        eprintln!("error: no scenario files given");
        return ExitCode::from(2);
    }
    let opts = Options {
        emit_plot_data: cli.emit_plot_data,
    };
    let results: Vec<Result<gselab_cli::RunReport, CliError>> = configs
        .par_iter()
        .map(|path| {
            let scenario = load(path)?;
            run(command, &scenario, &cli.out, opts)
        })
        .collect();
    let mut code = 0u8;
    for (path, result) in configs.iter().zip(results) {
        match result {
            Ok(report) => {
                if command == Command::Quantize {
                    println!("{}", report.summary);
                } else {
                    println!("{}: {}", report.scenario, report.summary);
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                code = code.max(e.exit_code());
            }
        }
    }
    ExitCode::from(code)
}
