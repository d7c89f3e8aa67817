//! Command-line surface. Every argument struct is serializable so the
//! resolved configuration can be echoed into reports verbatim.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "pslab",
    version,
    about = "Exact counting and exponential-sum laboratory for floor-power primes",
    propagate_version = true,
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// The epsilon run parameter used by predictor formulas
    #[arg(long, global = true, default_value_t = 0.01)]
    pub eps: f64,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for pseudo-random coefficient generators
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Memory budget in bytes for sieve tables
    #[arg(long, global = true, default_value_t = 2_147_483_648)]
    pub mem_budget: u64,

    /// Zero volatile fields (wall times) for byte-stable output
    #[arg(long, global = true)]
    pub stable: bool,

    /// Key = value file overriding command-line flags (see docs/config.md)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Count floor-power primes by the direct and/or interval method
    Count(CountArgs),
    /// Exact counts against main terms over an x grid
    Asym(AsymArgs),
    /// Certified enclosure of the Euler product constant
    Sigma(SigmaArgs),
    /// Exponent-pair word evaluation and search
    Exppair(ExppairArgs),
    /// Sawtooth approximation error scan
    Vaaler(VaalerArgs),
    /// Exponential-sum evaluators with bound predictions
    #[command(subcommand)]
    Expsum(ExpsumCommand),
    /// Verify the von Mangoldt identity across a range
    HbCheck(HbCheckArgs),
    /// Evaluate the decomposition window hypotheses
    HbWindow(HbWindowArgs),
    /// Write a sieve table to disk in the documented binary layout
    SieveDump(SieveDumpArgs),
}

impl Command {
    pub fn kind(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Asym(_) => "asym",
            Command::Sigma(_) => "sigma",
            Command::Exppair(_) => "exppair",
            Command::Vaaler(_) => "vaaler",
            Command::Expsum(ExpsumCommand::Triple(_)) => "expsum_triple",
            Command::Expsum(ExpsumCommand::Bilinear(_)) => "expsum_bilinear",
            Command::Expsum(ExpsumCommand::Prime(_)) => "expsum_prime",
            Command::HbCheck(_) => "hb_check",
            Command::HbWindow(_) => "hb_window",
            Command::SieveDump(_) => "sieve_dump",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Expsum(_) => "expsum",
            other => other.kind(),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    /// Exponent c as a reduced fraction a/b, e.g. 21/20
    #[arg(long)]
    pub c: String,

    /// Upper limit x (accepts 100000 or 1e5)
    #[arg(long)]
    pub x: String,

    /// Which counting function
    #[arg(long, default_value = "sqfree")]
    pub variant: String,

    /// direct, interval, or both (both asserts equality)
    #[arg(long, default_value = "both")]
    pub method: String,

    /// Accept any 1 < c < 2 instead of the theorem range
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymArgs {
    /// Exponent c as a reduced fraction a/b
    #[arg(long)]
    pub c: String,

    /// Comma-separated x values, e.g. 1e4,1e5,1e6
    #[arg(long)]
    pub x_grid: String,

    /// Which counting function
    #[arg(long, default_value = "sqfree")]
    pub variant: String,

    /// Prime limit for the sigma enclosure (consec main term)
    #[arg(long, default_value = "1e6")]
    pub sigma_limit: String,

    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SigmaArgs {
    /// Euler product truncation (>= 3)
    #[arg(long)]
    pub prime_limit: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ExppairArgs {
    /// Word over {A, B} with digit repetition, e.g. BA5BA2BA2B
    #[arg(long, conflicts_with = "search")]
    pub word: Option<String>,

    /// Enumerate words up to --max-len and report the objective minimizer
    #[arg(long)]
    pub search: bool,

    #[arg(long, default_value_t = 10)]
    pub max_len: usize,

    /// kappa+lambda, kappa, or lambda
    #[arg(long, default_value = "kappa+lambda")]
    pub objective: String,
}

#[derive(Debug, Args, Serialize)]
pub struct VaalerArgs {
    /// Truncation H
    #[arg(long = "H", visible_alias = "h")]
    pub h: u64,

    /// Scan grid size
    #[arg(long, default_value_t = 100_000)]
    pub grid: u64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum ExpsumCommand {
    /// Triple sum with absolute values on the inner m-sum
    Triple(TripleArgs),
    /// Coefficiented bilinear sum under the F >= M1*M2 hypothesis
    Bilinear(BilinearArgs),
    /// Von Mangoldt weighted sum over one dyadic n-range
    Prime(PrimeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TripleArgs {
    /// Phase sizes F, comma-separated for a grid
    #[arg(long, default_value = "10,100,1000")]
    pub f: String,

    /// H range sizes, comma-separated
    #[arg(long, default_value = "8,16,32")]
    pub h: String,

    /// N range sizes, comma-separated
    #[arg(long, default_value = "8,16,32")]
    pub n: String,

    /// M range sizes, comma-separated
    #[arg(long, default_value = "8,16,32")]
    pub m: String,

    /// Exponent alpha as a fraction or decimal-free rational
    #[arg(long, default_value = "20/21")]
    pub alpha: String,

    #[arg(long, default_value = "1/1")]
    pub beta: String,

    #[arg(long, default_value = "20/21")]
    pub gamma: String,
}

#[derive(Debug, Args, Serialize)]
pub struct BilinearArgs {
    /// F as multiples of M1*M2 (the hypothesis needs F >= M1*M2)
    #[arg(long, default_value = "1,4,16")]
    pub f_ratio: String,

    #[arg(long, default_value = "8,16,32")]
    pub m: String,

    #[arg(long, default_value = "8,16,32")]
    pub m1: String,

    #[arg(long, default_value = "8,16,32")]
    pub m2: String,

    #[arg(long, default_value = "20/21")]
    pub alpha: String,

    #[arg(long, default_value = "20/21")]
    pub alpha1: String,

    #[arg(long, default_value = "1/1")]
    pub alpha2: String,

    /// Exponent pair as a word applied to (0, 1)
    #[arg(long, default_value = "BA5BA2BA2B")]
    pub pair: String,

    /// one, mobius, random, or zero
    #[arg(long, default_value = "one")]
    pub coeff_a: String,

    #[arg(long, default_value = "one")]
    pub coeff_b: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PrimeArgs {
    #[arg(long)]
    pub c: String,

    /// Dyadic range start N; the sum runs over (N, N1]
    #[arg(long)]
    pub n: String,

    /// Range end, default 2N
    #[arg(long)]
    pub n1: Option<String>,

    /// Modulus d in the phase h n^gamma / d^2
    #[arg(long, default_value_t = 1)]
    pub d: u64,

    /// The x parameter of the frequency cutoff H = x^(eps-1) N d^2 (default N)
    #[arg(long)]
    pub x: Option<String>,

    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct HbCheckArgs {
    /// Identity order k in 1..=5
    #[arg(long)]
    pub k: u32,

    /// Check all n <= n_max
    #[arg(long, default_value = "5000")]
    pub n_max: String,
}

#[derive(Debug, Args, Serialize)]
pub struct HbWindowArgs {
    #[arg(long)]
    pub x: String,

    #[arg(long)]
    pub c: String,

    /// Dyadic block start N (default x)
    #[arg(long)]
    pub n: Option<String>,

    /// Frequency block H1
    #[arg(long, default_value_t = 1.0)]
    pub h1: f64,

    /// Modulus d (echoed in the report)
    #[arg(long, default_value_t = 1)]
    pub d: u64,

    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SieveDumpArgs {
    #[arg(long, default_value = "1")]
    pub lo: String,

    #[arg(long)]
    pub hi: String,

    /// Output path
    #[arg(long)]
    pub out: PathBuf,

    /// Re-read the file and verify it matches
    #[arg(long)]
    pub verify: bool,
}
