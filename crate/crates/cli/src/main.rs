//! `birkhoff`: normal forms, first integrals, degree audits and growth scans
//! from Hamiltonian spec files.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 invalid input,
//! 3 internal or engine error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{write_manifest, InputRecord, Manifest, RunClock};

#[derive(Debug, Parser)]
#[command(name = "birkhoff", version, about = "Birkhoff normal forms, first integrals and their parameter dependence")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory receiving the outputs and `manifest.json`.
    #[arg(short, long, global = true, default_value = "birkhoff-out")]
    out: PathBuf,
    /// Binary precision of float runs.
    #[arg(long, global = true, env = "BIRKHOFF_PRECISION", default_value_t = birkhoff::scalar::DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normal form, generating function and transformation of one spec.
    Normalize(commands::NormalizeArgs),
    /// Parameter-degree audit of a pencil, or of the default matrix.
    Audit(commands::AuditArgs),
    /// Growth of the normal form over a grid of pencil parameters.
    Scan(commands::ScanArgs),
    /// Coefficient growth and radius estimate of one normal form.
    Growth(commands::GrowthArgs),
    /// First integrals `P_k = ξ_k η_k` and `F(P₁, …, Pₙ)`.
    Integrals(commands::IntegralsArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Normalize(_) => "normalize",
            Command::Audit(_) => "audit",
            Command::Scan(_) => "scan",
            Command::Growth(_) => "growth",
            Command::Integrals(_) => "integrals",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// A property check failed (exit 1).
    Fail(String),
    /// Bad input: unreadable or invalid specs, resonant frequencies, bad flags (exit 2).
    Input(String),
    /// Engine or I/O failure (exit 3).
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Fail(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Fail(m) | CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

/// State shared by the commands of one run.
pub struct Run {
    pub out: output::OutputDir,
    pub inputs: Vec<InputRecord>,
    pub precision: usize,
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let clock = RunClock::start();
    let name = cli.command.name();
    if cli.common.precision < 53 {
        eprintln!("error: precision must be at least 53 bits");
        return ExitCode::from(2);
    }
    let mut run = match output::OutputDir::create(&cli.common.out) {
        Ok(out) => Run {
            out,
            inputs: Vec::new(),
            precision: cli.common.precision,
            seed: None,
        },
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.code());
        }
    };
    let result = match &cli.command {
        Command::Normalize(a) => commands::normalize(a, &mut run),
        Command::Audit(a) => commands::audit(a, &mut run),
        Command::Scan(a) => commands::scan(a, &mut run),
        Command::Growth(a) => commands::growth(a, &mut run),
        Command::Integrals(a) => commands::integrals(a, &mut run),
    };
    let (code, status) = match &result {
        Ok(()) => (0, "ok".to_string()),
        Err(e) => {
            eprintln!("error: {}", e.message());
            (e.code(), e.message().to_string())
        }
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        args: std::env::args().skip(1).collect(),
        inputs: &run.inputs,
        precision_bits: run.precision,
        seed: run.seed,
        outputs: run.out.written(),
        elapsed_seconds: clock.seconds(),
        exit_code: i32::from(code),
        status,
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if let Err(e) = write_manifest(&cli.common.out, &manifest) {
        eprintln!("error: {}", e.message());
        return ExitCode::from(3);
    }
    ExitCode::from(code)
}
