use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hetnet::cli::{self, Command, GridSpec, RunManifest};
use hetnet::optimizer::SweepAxis;

#[derive(Parser)]
#[command(
    name = "hetnet",
    about = "Two-tier mmWave network coverage analysis, simulation, and bias optimization"
)]
struct Cli {
    /// Network configuration file (TOML); bundled defaults when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long, global = true, default_value = "out.csv")]
    out: PathBuf,
    /// RNG seed for simulation commands
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Trial count for simulation commands
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    /// Carve association exclusion disks out of the two-tier interference
    /// integrals instead of integrating from zero
    #[arg(long, global = true)]
    exact_exclusion: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1.0)]
    grid_min: f64,
    #[arg(long, default_value_t = 1e4)]
    grid_max: f64,
    #[arg(long, default_value_t = 60)]
    grid_points: usize,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec { min: self.grid_min, max: self.grid_max, points: self.grid_points }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Association probabilities and loads across a bias grid
    Associate {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Coverage breakdown at one rate threshold
    Coverage {
        #[arg(long)]
        delta: f64,
    },
    /// Find the bias maximizing rate coverage over a grid
    Optimize {
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Monte Carlo estimates of association and rate coverage
    Simulate {
        #[arg(long)]
        delta: f64,
    },
    /// Analysis sweep along one axis
    Sweep {
        /// One of: bias, delta, lambda_s, beamwidths
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Rate threshold used for the coverage columns (ignored for the
        /// delta axis)
        #[arg(long, default_value_t = 1e6)]
        delta: f64,
    },
    /// Cross-check analysis against simulation; nonzero exit on failure
    Validate {
        #[arg(long, default_value_t = 3_162_277.6601683795)]
        delta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match &cli.command {
        Cmd::Associate { grid } => Command::Associate { grid: grid.spec() },
        Cmd::Coverage { delta } => Command::Coverage { delta: *delta },
        Cmd::Optimize { delta, grid } => Command::Optimize { delta: *delta, grid: grid.spec() },
        Cmd::Simulate { delta } => Command::Simulate { delta: *delta },
        Cmd::Sweep { axis, values, delta } => match SweepAxis::parse(axis) {
            Ok(axis) => Command::Sweep { axis, values: values.clone(), delta: *delta },
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        Cmd::Validate { delta } => Command::Validate { delta: *delta },
    };
    let manifest = RunManifest {
        config_path: cli.config,
        command,
        output_path: cli.out,
        seed: cli.seed,
        trials: cli.trials,
        exact_exclusion: cli.exact_exclusion,
    };
    match cli::run(&manifest) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
