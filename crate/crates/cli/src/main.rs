use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use continuum_emu_cli::config::SEED_ENV;
use continuum_emu_cli::{cmd_run, cmd_sweep, cmd_validate, RunArgs, SweepArgs};

#[derive(Parser)]
#[command(name = "continuum-emu", version, about = "Edge-to-cloud task placement emulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured strategy once and compare them.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config value, e.g. `--set workload.kmeans.n_points=1000`.
        #[arg(long = "set", value_name = "PATH=VALUE")]
        sets: Vec<String>,
    },
    /// Run the configured parameter sweep and write a long-format CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = std::env::var(SEED_ENV).ok();
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let code = match cli.command {
        Command::Run { config, seed, out: dir, sets } => cmd_run(
            &RunArgs {
                config,
                seed,
                out: dir,
                sets,
                env_seed,
            },
            &mut out,
            &mut err,
        ),
        Command::Sweep { config, out: dir, jobs } => cmd_sweep(
            &SweepArgs {
                config,
                out: dir,
                jobs,
                env_seed,
            },
            &mut out,
            &mut err,
        ),
        Command::Validate { config } => cmd_validate(&config, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
