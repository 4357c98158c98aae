use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kinetic_traffic::experiments::{execute, Command};

#[derive(Parser)]
#[command(name = "ktraffic", version, about = "Kinetic traffic simulations and their hydrodynamic limit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Seed for the particle solver.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the kinetic solver and check the run-level invariants.
    Simulate(Common),
    /// Sweep the scaling parameter and fit convergence rates.
    Sweep(Common),
    /// Picard iteration trace.
    Picard(Common),
    /// Grid vs particles, or finite volumes vs sticky particles.
    Compare(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Picard(a) => (Command::Picard, a),
        Cmd::Compare(a) => (Command::Compare, a),
    };
    let manifest = execute(command, &args.config, &args.out, args.seed);
    for c in &manifest.assertions {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {:.6e} (limit {:.6e}) {}", c.name, c.value, c.limit, c.detail);
    }
    if let Some(e) = &manifest.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(manifest.exit_code as u8)
}
