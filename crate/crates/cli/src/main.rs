//! `tailmass` command-line harness: seeded experiment runs that write CSV
//! tables, plus single-step commands for networks, samples and fits.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailmass::bayesnet::CptRegime;
use tailmass::experiment::QGrid;
use tailmass::gcurve::WeightMode;
use tailmass::tailfit::{RobustMethod, ThresholdRule};

/// Exit statuses.
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(author, version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random (or given) network: exact, empirical, tail-fit and log-normal curves
    DiscreteExperiment(DiscreteArgs),
    /// Continuous exemplar: draws, curves and the tail table
    ContinuousExperiment(ContinuousArgs),
    /// Truncated-marginal error against G(p0)
    MarginalBound(BoundArgs),
    /// Write a random network as JSON
    GenNet(GenNetArgs),
    /// Draw a sample of probabilities
    Sample(SampleArgs),
    /// Fit the tail of a sample file
    Fit(FitArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Regime {
    Uniform,
    Extreme,
}

impl From<Regime> for CptRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Uniform => CptRegime::UnitUniform,
            Regime::Extreme => CptRegime::Extreme,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Discrete,
    Continuous,
}

impl From<Mode> for WeightMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Discrete => WeightMode::Discrete,
            Mode::Continuous => WeightMode::Continuous,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Robust {
    Median,
    Lms,
}

impl From<Robust> for RobustMethod {
    fn from(r: Robust) -> Self {
        match r {
            Robust::Median => RobustMethod::Median,
            Robust::Lms => RobustMethod::Lms,
        }
    }
}

/// Shape of a randomly generated network.
#[derive(Args, Debug, Clone)]
pub struct NetShape {
    #[arg(long, default_value_t = 15)]
    pub nodes: usize,
    #[arg(long, default_value_t = 2)]
    pub cardinality: usize,
    #[arg(long, default_value_t = 3)]
    pub max_parents: usize,
    #[arg(long, value_enum, default_value_t = Regime::Uniform)]
    pub regime: Regime,
}

#[derive(Args, Debug)]
pub struct DiscreteArgs {
    #[command(flatten)]
    pub shape: NetShape,
    /// Network JSON file; overrides the random network
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// auto:<count> | value:<u> | schedule:<start>[:<target>]
    #[arg(long, default_value = "auto:50", value_parser = parse_threshold)]
    pub threshold: ThresholdRule,
    #[arg(long, value_enum, default_value_t = Robust::Median)]
    pub robust: Robust,
    /// auto[:<count>] | log:<lo>:<hi>:<count> | comma-separated list
    #[arg(long, default_value = "auto", value_parser = parse_q_grid)]
    pub q_grid: QGrid,
    /// Curve CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the fit report CSV here
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ContinuousArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to value:<0.0951 * lambda>
    #[arg(long, value_parser = parse_threshold)]
    pub threshold: Option<ThresholdRule>,
    #[arg(long, value_enum, default_value_t = Robust::Median)]
    pub robust: Robust,
    #[arg(long, default_value = "auto", value_parser = parse_q_grid)]
    pub q_grid: QGrid,
    /// Probabilities tabulated in table.csv
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.01,0.005,0.002")]
    pub p_list: Vec<f64>,
    /// Output directory for draws.csv, curve.csv, table.csv and fit.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub shape: NetShape,
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,1e-6,1e-5,1e-4,1e-3,1e-2"
    )]
    pub p0: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenNetArgs {
    #[command(flatten)]
    pub shape: NetShape,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = Mode::Discrete)]
    pub mode: Mode,
    /// Network JSON file (discrete mode)
    #[arg(long, required_if_eq("mode", "discrete"))]
    pub network: Option<PathBuf>,
    /// Continuous exemplar parameter (continuous mode)
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// CSV with a `p` column
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Discrete)]
    pub mode: Mode,
    #[arg(long, default_value = "auto:50", value_parser = parse_threshold)]
    pub threshold: ThresholdRule,
    #[arg(long, value_enum, default_value_t = Robust::Median)]
    pub robust: Robust,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> Result<ThresholdRule, String> {
    s.parse().map_err(|e: tailmass::Error| e.to_string())
}

fn parse_q_grid(s: &str) -> Result<QGrid, String> {
    s.parse().map_err(|e: tailmass::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::DiscreteExperiment(a) => commands::discrete_experiment(&a),
        Command::ContinuousExperiment(a) => commands::continuous_experiment(&a),
        Command::MarginalBound(a) => commands::marginal_bound(&a),
        Command::GenNet(a) => commands::gen_net(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Fit(a) => commands::fit(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
