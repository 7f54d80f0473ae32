use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Parser)]
#[command(name = "bergman-lab", version, about = "Numerical laboratory for weighted harmonic Bergman spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Gauss-Legendre order of the base disk rule
    #[arg(long, global = true)]
    pub quad_radial: Option<usize>,

    /// Trapezoid node count of the base disk rule
    #[arg(long, global = true)]
    pub quad_angular: Option<usize>,

    /// Seed for randomized test families
    #[arg(long, global = true, default_value_t = 17)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Estimate the A2 constant of a weight over metric balls
    A2(A2Args),
    /// Build an epsilon-lattice with separation and cover certificates
    Lattice(LatticeArgs),
    /// Check the pointwise bounds of the harmonic kernel on pseudo-disks
    KernelBounds(KernelBoundsArgs),
    /// Gram conditioning and orthonormalization residual of the truncation
    SpaceReport(SpaceArgs),
    /// Truncated Toeplitz matrix: singular values, Schatten norms, Berezin and Carleson sups
    Toeplitz(ToeplitzArgs),
    /// Berezin transform of a measure on a polar grid
    Berezin(BerezinArgs),
    /// Carleson ratio sweep and vanishing profile
    Carleson(CarlesonArgs),
    /// Boundary-ball, box and reverse-Carleson densities of a set
    ReverseCarleson(ReverseArgs),
    /// Empirical frame bounds of a lattice sampling sum
    Frame(FrameArgs),
    /// Atomic decomposition of a seeded random harmonic polynomial
    Atomic(AtomicArgs),
    /// Schatten norms of the truncations and the lattice sum
    Schatten(SchattenArgs),
    /// Invertibility indicators for a symbol on a standard-weight space
    Invertibility(InvertibilityArgs),
    /// Compare the block form of W T W* with the direct truncation
    BlockCheck(BlockArgs),
    /// Run the acceptance battery
    Suite(SuiteArgs),
    /// Run a saved configuration
    Run(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::A2(_) => "a2",
            Command::Lattice(_) => "lattice",
            Command::KernelBounds(_) => "kernel-bounds",
            Command::SpaceReport(_) => "space-report",
            Command::Toeplitz(_) => "toeplitz",
            Command::Berezin(_) => "berezin",
            Command::Carleson(_) => "carleson",
            Command::ReverseCarleson(_) => "reverse-carleson",
            Command::Frame(_) => "frame",
            Command::Atomic(_) => "atomic",
            Command::Schatten(_) => "schatten",
            Command::Invertibility(_) => "invertibility",
            Command::BlockCheck(_) => "block-check",
            Command::Suite(_) => "suite",
            Command::Run(_) => "run",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct A2Args {
    /// alpha:<a> | poly:<c0,c1,..> | dsl:<expr> | grid:<file.csv>
    #[arg(long, default_value = "alpha:0")]
    pub weight: String,
    #[arg(long, default_value_t = 3)]
    pub refinements: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 1.0 / 32.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.02)]
    pub cutoff: f64,
    /// Probe grid size for the cover certificate
    #[arg(long, default_value_t = 200)]
    pub probe: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KernelBoundsArgs {
    #[arg(long, default_value_t = 0.125)]
    pub r: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 16)]
    pub rays: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,0.9,0.95")]
    pub moduli: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpaceArgs {
    #[arg(long, default_value = "alpha:0")]
    pub weight: String,
    #[arg(long = "N", default_value_t = 8)]
    pub degree: usize,
    /// Also write gram.csv and transform.csv into this directory
    #[arg(long)]
    pub export: Option<PathBuf>,
}

/// A measure `φ ω dA + sum w_i δ_{p_i}`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[arg(long, default_value = "alpha:0")]
    pub weight: String,
    /// Density as `dsl:<expr>` (or a bare expression)
    #[arg(long)]
    pub symbol: Option<String>,
    /// CSV of atoms `x,y,mass`
    #[arg(long)]
    pub atoms: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ToeplitzArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long = "N", default_value_t = 8)]
    pub degree: usize,
    /// Schatten exponents; `inf` for the operator norm
    #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
    pub p: Vec<String>,
    #[arg(long, default_value_t = 0.125)]
    pub radius: f64,
    /// Add the lattice sum over an epsilon-lattice of this epsilon
    #[arg(long)]
    pub lattice_epsilon: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 16)]
    pub rays: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.3,0.5,0.7,0.8,0.9")]
    pub moduli: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BerezinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CarlesonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 0.125)]
    pub radius: f64,
    #[arg(long, default_value_t = 16)]
    pub rays: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,0.8,0.9,0.95,0.99")]
    pub moduli: Vec<f64>,
    /// Vanishing iff the last band is below this fraction of the first
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReverseArgs {
    /// all | halfplane:a | annulus:r1,r2 | disk:x,y,r | pseudo:x,y,r | complement:<spec> | union:<spec>;<spec> | levelset:<expr>,t
    #[arg(long, default_value = "halfplane:0")]
    pub set: String,
    #[arg(long, default_value = "alpha:0")]
    pub weight: String,
    /// Box scale r of S(a, r)
    #[arg(long, default_value_t = 0.5)]
    pub box_radius: f64,
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Weight exponent of the kernel bumps
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long = "N", default_value_t = 12)]
    pub degree: usize,
    #[arg(long, default_value_t = 0.95)]
    pub bump_modulus: f64,
    #[arg(long, default_value_t = 50)]
    pub random: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FrameArgs {
    #[arg(long, default_value = "alpha:0")]
    pub weight: String,
    #[arg(long, default_value_t = 1.0 / 32.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.02)]
    pub cutoff: f64,
    #[arg(long = "N", default_value_t = 12)]
    pub degree: usize,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 16)]
    pub bumps: usize,
    #[arg(long, default_value_t = 0.9)]
    pub bump_modulus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// normalized R-kernel atoms
    R,
    /// reproducing-kernel atoms of the weighted space
    K,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AtomicArgs {
    #[arg(long, default_value = "alpha:0")]
    pub weight: String,
    #[arg(long, default_value_t = 1.0 / 32.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.02)]
    pub cutoff: f64,
    #[arg(long = "N", default_value_t = 8)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = Flavor::R)]
    pub flavor: Flavor,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SchattenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long = "N-list", value_delimiter = ',', default_value = "8,12,16,20")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Lattice epsilon for the sum of (ν(D)/|D|)^p
    #[arg(long)]
    pub lattice_epsilon: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InvertibilityArgs {
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Nonnegative symbol as `dsl:<expr>`
    #[arg(long, default_value = "dsl:1")]
    pub symbol: String,
    /// Analytic polynomial coefficients `re[:im],..` low to high; replaces --symbol
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<String>>,
    #[arg(long = "N-list", value_delimiter = ',', default_value = "8,12,16,20")]
    pub n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5")]
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BlockArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub alpha: Vec<f64>,
    #[arg(long = "N", default_value_t = 8)]
    pub degree: usize,
    /// Real symbol as `dsl:<expr>`; without it (and --coeffs) the standard battery runs
    #[arg(long)]
    pub symbol: Option<String>,
    /// Analytic polynomial coefficients `re[:im],..` low to high
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SuiteArgs {
    /// Criterion ids to run; all by default
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RunArgs {
    /// JSON configuration as embedded in any report
    #[arg(long)]
    pub config: PathBuf,
}

/// Everything needed to reproduce a run. Every report embeds it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(flatten)]
    pub common: Common,
}

impl RunConfig {
    /// Parses a configuration file. Missing fields take the command-line
    /// defaults of the named subcommand.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let given: Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
        let Value::Object(given) = given else {
            return Err("config must be a JSON object".into());
        };
        let name = given
            .get("subcommand")
            .and_then(Value::as_str)
            .ok_or("config has no `subcommand`")?
            .to_string();
        if name == "run" {
            return Err("a config cannot itself be a `run`".into());
        }
        let defaults = Cli::try_parse_from(["bergman-lab", name.as_str()])
            .map_err(|_| format!("unknown or incomplete subcommand `{name}`"))?;
        let mut merged = serde_json::to_value(RunConfig {
            command: defaults.command,
            common: defaults.common,
        })
        .map_err(|e| e.to_string())?;
        let obj = merged.as_object_mut().expect("config serializes to an object");
        for (k, v) in given {
            if !obj.contains_key(&k) && k != "subcommand" {
                return Err(format!("unknown config field `{k}` for `{name}`"));
            }
            obj.insert(k, v);
        }
        serde_json::from_value(merged).map_err(|e| format!("invalid config: {e}"))
    }
}
