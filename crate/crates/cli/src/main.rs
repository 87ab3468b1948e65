/// `println!` that ignores a closed stdout, so piping into `head` is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

mod commands;
mod exit;
mod files;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Exchangeable states on finite CAR algebras.
#[derive(Parser, Debug)]
#[command(name = "carx", version)]
pub struct Cli {
    /// Seed of the SplitMix64 generator; printed in every report.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recover the mixing measure of a symmetric state.
    Decompose(DecomposeArgs),
    /// Run the invariant suite on n modes.
    Verify(VerifyArgs),
    /// Exact intersecting fraction against its mk/N estimate.
    Count(CountArgs),
    /// Strong-clustering defects along the dyadic mixing sequence.
    Cluster(ClusterArgs),
    /// Factor type of a product state.
    Classify(ClassifyArgs),
    /// Oddness averages and odd GNS compressions.
    Oddness(OddnessArgs),
    /// Write a state file for a product state or a mixture of them.
    MakeState(MakeStateArgs),
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Measure CSV to write.
    #[arg(long, required_unless_present = "compare")]
    pub out: Option<PathBuf>,
    /// Also write the JSON report here (it always goes to stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Reconstruct from this measure CSV and compare instead of recovering.
    #[arg(long, conflicts_with = "out")]
    pub compare: Option<PathBuf>,
    /// Random symmetrized observables in the battery.
    #[arg(long, default_value_t = 50)]
    pub observables: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long = "N")]
    pub big_n: usize,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[arg(long, conflicts_with = "state", required_unless_present = "state")]
    pub mu: Option<f64>,
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub stages: usize,
    /// Number of modes for --mu; taken from the file with --state.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub mu: f64,
    /// Modes used for the eigenvalue-ratio witness.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct OddnessArgs {
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    /// Product state used for the GNS compression.
    #[arg(long, default_value_t = 0.3)]
    pub mu: f64,
}

#[derive(Args, Debug)]
pub struct MakeStateArgs {
    #[arg(long)]
    pub n: usize,
    /// Product state parameter.
    #[arg(long, conflicts_with_all = ["mixture", "random"])]
    pub mu: Option<f64>,
    /// Mixture of product states as `mu:weight,mu:weight,...`.
    #[arg(long, conflicts_with = "random")]
    pub mixture: Option<String>,
    /// A random (generally non-symmetric) density from --seed.
    #[arg(long)]
    pub random: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::PARSE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code as u8)
        }
    }
}
