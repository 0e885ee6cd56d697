use std::path::PathBuf;

use bicoef_core::{ClassSpec, Complex64, FnuSpec, Lemma, PhiProfile, TestFunction, TruncatedSeries};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bicoef",
    version,
    about = "Coefficient bounds for bi-univalent function classes, with numerical checks"
)]
pub struct Cli {
    /// Read default flag values from a `key = value` file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with = "format")]
    pub json: bool,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format.unwrap_or(Format::Plain)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds on |a2| and |a3| for a class.
    Bounds(BoundsArgs),
    /// Closed-form infimum of a piecewise ratio, optionally checked by grid search.
    Lemma(LemmaArgs),
    /// Bound on the Fekete-Szego functional.
    FeketeSzego(FeketeSzegoArgs),
    /// Test f_nu (or a polynomial) for class membership.
    Membership(MembershipArgs),
    /// Smallest nu in a bracket with f_nu in the class.
    Threshold(ThresholdArgs),
    /// Seeded stress test of the bounds.
    Sample(SampleArgs),
    /// Compositional inverse of a normalized series.
    Invert(InvertArgs),
    /// Bounds over a (lambda, family parameter) grid.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds(_) => "bounds",
            Command::Lemma(_) => "lemma",
            Command::FeketeSzego(_) => "fekete-szego",
            Command::Membership(_) => "membership",
            Command::Threshold(_) => "threshold",
            Command::Sample(_) => "sample",
            Command::Invert(_) => "invert",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassKind {
    #[value(name = "r-sigma")]
    RSigma,
    #[value(name = "bi-starlike")]
    BiStarlike,
}

#[derive(Debug, Args)]
pub struct ClassArgs {
    #[arg(long, value_enum, default_value = "r-sigma")]
    pub class: ClassKind,

    /// Required for r-sigma.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// e.g. `beta:beta=0`, `power:alpha=0.5`, `janowski:A=1,B=-1`, `sqrt`,
    /// `custom:b1=2,b2=1.5`.
    #[arg(long)]
    pub phi: PhiProfile,
}

impl ClassArgs {
    pub fn spec(&self) -> Result<ClassSpec, CliError> {
        match (self.class, self.lambda) {
            (ClassKind::RSigma, Some(lambda)) => Ok(ClassSpec::r_sigma(lambda, self.phi)?),
            (ClassKind::RSigma, None) => Err(CliError::Usage(
                "--lambda is required for --class r-sigma".into(),
            )),
            (ClassKind::BiStarlike, None) => Ok(ClassSpec::bi_starlike(self.phi)?),
            (ClassKind::BiStarlike, Some(_)) => Err(CliError::Usage(
                "--lambda does not apply to --class bi-starlike".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub class: ClassArgs,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    /// L21, L22 or L23.
    #[arg(long)]
    pub id: Lemma,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: f64,
    #[arg(long)]
    pub eta: f64,
    /// Also run the grid-search oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Oracle box half-width.
    #[arg(long, default_value_t = 100.0)]
    pub half_width: f64,
    /// Oracle refinement levels.
    #[arg(long, default_value_t = 4)]
    pub levels: u32,
    /// Oracle base grid step.
    #[arg(long, default_value_t = 0.25)]
    pub base_step: f64,
    /// Largest accepted relative gap between oracle and closed form.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct FeketeSzegoArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Also stress-test the bound on this many seeded samples.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MembershipArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    /// `fnu:nu=1.5` or `series:1,0.5,0.25` (coefficients a1..aN).
    #[arg(long)]
    pub function: FunctionArg,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Circle radii in (0, 1].
    #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.99, 0.999, 1.0])]
    pub radii: Vec<f64>,
    /// Samples per circle.
    #[arg(long, default_value_t = 2048)]
    pub angles: usize,
    /// Margins down to minus this count as contained.
    #[arg(long, default_value_t = 1e-9)]
    pub closure_tol: f64,
}

impl SamplingArgs {
    pub fn config(&self) -> bicoef_core::MembershipConfig {
        bicoef_core::MembershipConfig {
            radii: self.radii.clone(),
            angles: self.angles,
            closure_tol: self.closure_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Defaults to $BICOEF_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Coefficients a1..aN, comma separated; complex values as `1+2i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub coeffs: Vec<Complex64>,
    /// Pad with zeros up to this order.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    Power,
    Beta,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "r-sigma")]
    pub class: ClassKind,
    /// power (parameter alpha) or beta (parameter beta).
    #[arg(long, value_enum)]
    pub family: SweepFamily,
    #[arg(long)]
    pub param_min: f64,
    #[arg(long)]
    pub param_max: f64,
    #[arg(long, default_value_t = 10)]
    pub param_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 1)]
    pub lambda_steps: usize,
    /// Stress-test each grid point with this many samples.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A function given on the command line.
#[derive(Debug, Clone)]
pub struct FunctionArg(pub TestFunction);

impl std::str::FromStr for FunctionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim().to_ascii_lowercase().as_str() {
            "fnu" => {
                let value = rest
                    .trim()
                    .strip_prefix("nu=")
                    .ok_or_else(|| format!("expected `fnu:nu=<value>`, got `{s}`"))?;
                let nu: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid nu `{value}`"))?;
                Ok(FunctionArg(TestFunction::Fnu(
                    FnuSpec::new(nu).map_err(|e| e.to_string())?,
                )))
            }
            "series" => {
                let coeffs = rest
                    .split(',')
                    .map(|c| c.trim().parse::<Complex64>().map_err(|_| format!("invalid coefficient `{c}`")))
                    .collect::<Result<Vec<_>, _>>()?;
                let series = TruncatedSeries::new(coeffs).map_err(|e| e.to_string())?;
                if !series.is_normalized() {
                    return Err("series must start with a1 = 1".into());
                }
                Ok(FunctionArg(TestFunction::Series(series)))
            }
            _ => Err(format!("unknown function `{s}` (expected fnu:nu=... or series:...)")),
        }
    }
}
