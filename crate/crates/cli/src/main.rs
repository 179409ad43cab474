use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parareal_cg_cli::{execute, Command, Manifest, Overrides};

#[derive(Parser)]
#[command(name = "parareal-cg", version, about = "Parareal with a Chebyshev-Gauss collocation fine propagator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Manifest file (flat TOML); flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random initial iterates.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the fine sweep.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Parareal stopping tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stability and contraction factors on a z grid.
    Analyze,
    /// Smallest collocation degree for each z_max.
    Mmin,
    /// One parareal run, error per iteration.
    Run,
    /// A named experiment sweep.
    Experiment {
        /// kepler-compare, burgers-dt, burgers-dx or burgers-m.
        name: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, experiment) = match cli.command {
        Cmd::Analyze => (Command::Analyze, None),
        Cmd::Mmin => (Command::Mmin, None),
        Cmd::Run => (Command::Run, None),
        Cmd::Experiment { name } => (Command::Experiment, name),
    };
    let mut manifest = match &cli.config {
        Some(path) => match Manifest::load(path) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        },
        None => Manifest::default(),
    };
    Overrides {
        out: cli.out,
        seed: cli.seed,
        workers: cli.workers,
        tol: cli.tol,
        experiment,
    }
    .apply(&mut manifest);

    match execute(command, &manifest) {
        Ok(Some(bytes)) => {
            if std::io::stdout().write_all(&bytes).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
