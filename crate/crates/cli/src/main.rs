use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;
mod settings;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or geometry. Exit code 3.
    Input(String),
    /// A contraction or eigensolver failed. Exit code 1.
    Compute(String),
    /// A check ran and did not pass. Exit code 2.
    Verification(String),
}

impl From<lgt_renyi::Error> for CliError {
    fn from(e: lgt_renyi::Error) -> Self {
        use lgt_renyi::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidGeometry(_) | E::DimensionCap { .. } => CliError::Input(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Compute(m) | CliError::Verification(m) => m,
        }
    }
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to the command's defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Renyi order.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "N1")]
    pub n1: Option<usize>,
    #[arg(long = "N2")]
    pub n2: Option<usize>,
    #[arg(long = "R1")]
    pub r1: Option<usize>,
    #[arg(long = "R2")]
    pub r2: Option<usize>,
    /// finite, thermodynamic or both.
    #[arg(long)]
    pub method: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Parser, Debug)]
#[command(name = "lgt-renyi", version, about = "Renyi entropies of Z2 gauge-invariant PEPS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dominant eigenvalues of the bulk and boundary rows for every R1.
    Spectrum(#[command(flatten)] Common),
    /// S2 against R2 for R1 = 1, 2, 3 on a long cylinder, finite vs closed form.
    Fig5 {
        #[command(flatten)]
        common: Common,
        /// R2 range `lo:hi`.
        #[arg(long = "r2-range")]
        r2_range: Option<settings::IntRange>,
    },
    /// S2 across delta near 1 with second differences.
    Fig6 {
        #[command(flatten)]
        common: Common,
        /// Delta grid `min:max:step`.
        #[arg(long = "delta-grid")]
        delta_grid: Option<settings::Grid>,
    },
    /// S2 over the gamma-delta plane.
    Fig7 {
        #[command(flatten)]
        common: Common,
        #[arg(long = "gamma-grid")]
        gamma_grid: Option<settings::Grid>,
        #[arg(long = "delta-grid")]
        delta_grid: Option<settings::Grid>,
    },
    /// Single-point Renyi entropy.
    Entropy(#[command(flatten)] Common),
    /// Compare transfer purities with exact enumeration on a small lattice.
    OracleVerify(#[command(flatten)] Common),
    /// Purity of an MPS interval, transfer route vs state vector.
    MpsDemo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chi: Option<usize>,
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long)]
        len: Option<usize>,
    },
    /// Row-wise vs column-wise contraction of the same purity.
    Consistency(#[command(flatten)] Common),
    /// Run the acceptance suite and print a JSON summary.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Run a single criterion, e.g. C3.
        #[arg(long)]
        only: Option<String>,
        /// Treat known failures as fatal.
        #[arg(long)]
        strict: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    use commands as c;
    match cli.command {
        Command::Spectrum(common) => c::spectrum(&c::Ctx::new(common)?),
        Command::Fig5 { common, r2_range } => c::fig5(&c::Ctx::new(common)?, r2_range),
        Command::Fig6 { common, delta_grid } => c::fig6(&c::Ctx::new(common)?, delta_grid),
        Command::Fig7 { common, gamma_grid, delta_grid } => c::fig7(&c::Ctx::new(common)?, gamma_grid, delta_grid),
        Command::Entropy(common) => c::entropy(&c::Ctx::new(common)?),
        Command::OracleVerify(common) => c::oracle_verify(&c::Ctx::new(common)?),
        Command::MpsDemo { common, chi, sites, start, len } => {
            c::mps_demo(&c::Ctx::new(common)?, c::MpsArgs { chi, sites, start, len })
        }
        Command::Consistency(common) => c::consistency(&c::Ctx::new(common)?),
        Command::Verify { common, only, strict } => c::verify(&c::Ctx::new(common)?, only, strict),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
