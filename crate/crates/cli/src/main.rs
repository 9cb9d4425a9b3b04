mod commands;
mod error;
mod suite;
mod wire;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use error::CliError;

/// Exact constructions of S-regular cross sections, driven by JSON inputs.
#[derive(Parser, Debug)]
#[command(name = "lacuna", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct Global {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Interval precision for comparisons [env: LACUNA_PRECISION_BITS, default 256].
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Seed recorded in the report and used by randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Classify the group generated by S.
    Classify(commands::ClassifyArgs),
    /// Tile t by elements of S.
    Tile(commands::TileArgs),
    /// Density threshold K for a finite F.
    Threshold(commands::ThresholdArgs),
    /// Enumerate constrained walk totals A_n.
    An(commands::AnArgs),
    /// Constant-step tame refinement.
    TameConstant(commands::TameConstantArgs),
    /// General tame refinement.
    TameGeneral(commands::TameGeneralArgs),
    /// Regularize sparse windows.
    Regularize(commands::RegularizeArgs),
    /// Ranked block construction over a limit family.
    Blocks(commands::BlocksArgs),
    /// Classify S and route every window of a flow.
    Drive(commands::DriveArgs),
    /// Cyclic sections on a circle of length L.
    Circle(commands::CircleArgs),
    /// Certified dyadic escape witness.
    Dyadic(commands::DyadicArgs),
    /// Arithmetic checks for the locally lattice obstruction.
    Obstruction(commands::ObstructionArgs),
    /// Run the randomized property suite.
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.global, &cli.command) {
        Ok(report) => match emit(&cli.global, &report) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn emit(global: &Global, report: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::io(e.to_string()))?;
    text.push('\n');
    match &global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io(e.to_string())),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let payload = serde_json::json!({"error": e.payload()});
    eprintln!("{}", serde_json::to_string_pretty(&payload).unwrap_or_default());
    ExitCode::from(e.exit_code())
}
