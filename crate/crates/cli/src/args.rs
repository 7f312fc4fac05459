//! Command-line surface. Physically meaningful flags (`--sym`, `--l`, `--m`)
//! have no defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use contact_core::approx::ScalingExponent;
use contact_core::kernels::Symmetry;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "contact-spectra", version, about = "Spectra of few-body systems with contact interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Output {
    /// Data file; the run header goes to `<out>.run.json`.
    #[arg(long, short)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Output format (default: json for `assemble`, csv otherwise).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymArg {
    Fermion,
    Boson,
}

impl From<SymArg> for Symmetry {
    fn from(s: SymArg) -> Self {
        match s {
            SymArg::Fermion => Symmetry::Fermionic,
            SymArg::Boson => Symmetry::Bosonic,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChannelArgs {
    #[arg(long, value_enum)]
    pub sym: SymArg,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub m: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Tabulate the Mellin symbol on the real axis and the imaginary segment.
    Symbol(SymbolArgs),
    /// Critical mass ratios m* and m** of a channel.
    Thresholds(ThresholdArgs),
    /// Discretized channel spectrum and its Efimov ladder.
    Spectrum(SpectrumArgs),
    /// Efimov exponent and level ratios of a channel.
    Efimov(EfimovArgs),
    /// Four-fermion form estimates over a test-function manifest.
    Fourbody(FourbodyArgs),
    /// Birman-Schwinger eigenvalue along an eps sequence.
    Converge(ConvergeArgs),
    /// Zero-energy scattering lengths of a potential corpus.
    Scatter(ScatterArgs),
    /// Predicted spectrum of a contact graph.
    Assemble(AssembleArgs),
    /// Bound states of the one-dimensional relativistic point interaction.
    Salpeter(SalpeterArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 20.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 2001)]
    pub s_points: usize,
    #[arg(long, default_value_t = 100)]
    pub sigma_points: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMethod {
    Mellin,
    Scan,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub sym: SymArg,
    #[arg(long)]
    pub l: u32,
    #[arg(long, value_enum, default_value = "mellin")]
    pub method: ThresholdMethod,
    #[arg(long, default_value_t = 1e-3)]
    pub m_floor: f64,
    #[arg(long, default_value_t = 1e3)]
    pub m_ceiling: f64,
    /// Relative bracket width of the Mellin bisection.
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Scan window; defaults to [m*/2, 2 m**] from the Mellin result.
    #[arg(long)]
    pub scan_lo: Option<f64>,
    #[arg(long)]
    pub scan_hi: Option<f64>,
    /// Grid points per unit of ln p in the scan.
    #[arg(long, default_value_t = 12.0)]
    pub scan_density: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub scan_rel_tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long)]
    pub pmin: f64,
    #[arg(long)]
    pub pmax: f64,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct EfimovArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FourbodyArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Samples per form and member.
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentArg(pub ScalingExponent);

impl std::str::FromStr for ExponentArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3" => Ok(Self(ScalingExponent::Contact)),
            "1.5" | "3/2" => Ok(Self(ScalingExponent::Point)),
            _ => Err(format!("exponent must be 3 or 1.5, got {s}")),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub exponent: ExponentArg,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 48)]
    pub panels: usize,
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ScatterArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, default_value_t = 4000)]
    pub steps: usize,
    /// Also locate the first resonant coupling below `--g-max`.
    #[arg(long)]
    pub tune: bool,
    #[arg(long, default_value_t = 50.0)]
    pub g_max: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct AssembleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SalpeterArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    pub fit_points: usize,
    #[command(flatten)]
    pub output: Output,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Symbol(_) => "symbol",
            Command::Thresholds(_) => "thresholds",
            Command::Spectrum(_) => "spectrum",
            Command::Efimov(_) => "efimov",
            Command::Fourbody(_) => "fourbody",
            Command::Converge(_) => "converge",
            Command::Scatter(_) => "scatter",
            Command::Assemble(_) => "assemble",
            Command::Salpeter(_) => "salpeter",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            Command::Symbol(a) => &a.output,
            Command::Thresholds(a) => &a.output,
            Command::Spectrum(a) => &a.output,
            Command::Efimov(a) => &a.output,
            Command::Fourbody(a) => &a.output,
            Command::Converge(a) => &a.output,
            Command::Scatter(a) => &a.output,
            Command::Assemble(a) => &a.output,
            Command::Salpeter(a) => &a.output,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Fourbody(a) => Some(a.seed),
            _ => None,
        }
    }
}
