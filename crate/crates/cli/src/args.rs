use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use primelab::errorfit;
use serde::Serialize;

/// Accepts plain integers and exact scientific forms such as `1e8`.
pub fn count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    if !(0.0..=9.2e18).contains(&v) || v.fract() != 0.0 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}

fn positive_count(s: &str) -> Result<u64, String> {
    match count(s)? {
        0 => Err("must be at least 1".into()),
        v => Ok(v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "primelab",
    version,
    about = "Prime counting, Chebyshev functions, Mertens sums and explicit formulas"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write the artifact to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, value_parser = positive_count, value_name = "N")]
    #[serde(skip)]
    pub workers: Option<u64>,

    /// Zero-ordinate table; the bundled table of 1000 ordinates by default.
    #[arg(long, global = true, env = "PRIMELAB_ZEROS", value_name = "PATH")]
    pub zeros: Option<PathBuf>,

    /// Add an ISO-8601 generation time as a comment line.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Prime counts, primality, progressions and short intervals.
    Pi(PiArgs),
    /// θ(x) and its progression variant.
    Theta(ThetaArgs),
    /// ψ(x), ψ − θ, sign changes of ψ(x) − x, Λ tables.
    Psi(PsiArgs),
    /// Mertens function, squarefree counts and their envelopes.
    Mertens(MertensArgs),
    /// Logarithmic and exponential integrals.
    Li(LiArgs),
    /// Exact conversions between π, θ and ψ.
    Convert(ConvertArgs),
    /// Explicit-formula reconstructions of ψ and π.
    Explicit(ExplicitArgs),
    /// Zero-table summary and zero-count check.
    Zeros(ZerosArgs),
    /// Prime density in short intervals.
    ScanDensity(DensityArgs),
    /// Primes in every gap-length interval of a grid.
    ScanGap(GapArgs),
    /// Variance of ψ over short intervals and increment deviations.
    ScanVariance(VarianceArgs),
    /// Error terms of π, θ and ψ on a grid, with envelopes.
    ProfileError(ProfileArgs),
    /// Effective exponents fitted against log x.
    FitEpsilon(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PiMethod {
    Sieve,
    Legendre,
}

#[derive(Debug, Args, Serialize)]
pub struct PiArgs {
    #[arg(long, value_parser = count)]
    pub x: Option<u64>,
    #[arg(long, value_enum, default_value_t = PiMethod::Sieve)]
    pub method: PiMethod,
    /// Count primes in (x, x + Y].
    #[arg(long, value_parser = count, value_name = "Y", requires = "x")]
    pub interval: Option<u64>,
    /// Brun–Titchmarsh check on (x, x + Y].
    #[arg(long, value_parser = count, value_name = "Y", requires = "x")]
    pub bt: Option<u64>,
    #[arg(long, value_parser = count, requires_all = ["x", "a"])]
    pub q: Option<u64>,
    #[arg(long, value_parser = count, requires = "q")]
    pub a: Option<u64>,
    /// List primes in [LO, HI).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = count)]
    pub primes: Option<Vec<u64>>,
    #[arg(long, value_parser = count, value_name = "N")]
    pub is_prime: Option<u64>,
    /// π on a log-spaced grid.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "POINTS"], value_parser = count)]
    pub grid: Option<Vec<u64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaArgs {
    #[arg(long, value_parser = count)]
    pub x: Option<u64>,
    #[arg(long, value_parser = count, requires_all = ["x", "a"])]
    pub q: Option<u64>,
    #[arg(long, value_parser = count, requires = "q")]
    pub a: Option<u64>,
    /// θ and ψ on a log-spaced grid.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "POINTS"], value_parser = count)]
    pub grid: Option<Vec<u64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct PsiArgs {
    #[arg(long, value_parser = count)]
    pub x: Option<u64>,
    /// Evaluate through θ(x) + θ(x^{1/2}) + ... instead of summing Λ.
    #[arg(long, requires = "x")]
    pub series: bool,
    #[arg(long, requires = "x", conflicts_with = "series")]
    pub minus_theta: bool,
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEP"], value_parser = count)]
    pub sign_changes: Option<Vec<u64>>,
    /// Λ(n) for n in [LO, HI).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = count)]
    pub lambda: Option<Vec<u64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct MertensArgs {
    #[arg(long, value_parser = count)]
    pub x: Option<u64>,
    /// Report Q(x) instead of M(x).
    #[arg(long, requires = "x")]
    pub squarefree: bool,
    /// Check |M(x)| <= x^{7/12} on a log-spaced grid.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "POINTS"], value_parser = count)]
    pub envelope: Option<Vec<u64>>,
    /// M and Q on a log-spaced grid.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "POINTS"], value_parser = count)]
    pub grid: Option<Vec<u64>>,
    /// μ(n) for n in [LO, HI).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = count)]
    pub mu: Option<Vec<u64>>,
    /// Check the M and Q envelopes at every integer up to LIMIT.
    #[arg(long, value_parser = count, value_name = "LIMIT")]
    pub check_all: Option<u64>,
    /// Σ_{n<N} M(n)(1/n² − 1/(n+1)²) against 6/π².
    #[arg(long, value_parser = count, value_name = "N")]
    pub zeta_shadow: Option<u64>,
}

#[derive(Debug, Args, Serialize, Clone, Copy)]
pub struct QuadArgs {
    #[arg(long, default_value_t = 1e-13)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-13)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_depth: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct LiArgs {
    #[arg(long)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Ei at RE + i·IM.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub ei: Option<Vec<f64>>,
    /// Switchover radius of the Ei power series.
    #[arg(long, default_value_t = 40.0)]
    pub radius: f64,
    /// ∫_2^x dt/(t^ν log^C t) against x^{1−ν}/log^C x.
    #[arg(long, num_args = 3, value_names = ["NU", "C", "X"])]
    pub envelope: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvertCheck {
    /// π, θ, ψ conversions and the two weighted prime sums.
    #[value(alias = "thm16")]
    Primes,
    /// Conversions restricted to a progression.
    #[value(alias = "thm17")]
    Progression,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub check: ConvertCheck,
    #[arg(long, value_parser = count)]
    pub x: u64,
    #[arg(long, value_parser = count)]
    pub q: Option<u64>,
    #[arg(long, value_parser = count)]
    pub a: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExplicitArgs {
    #[arg(long)]
    pub x: Option<f64>,
    /// Number of zeros; all loaded zeros by default.
    #[arg(long)]
    pub k: Option<usize>,
    /// Reconstruct π instead of ψ.
    #[arg(long, requires = "x")]
    pub pi: bool,
    /// Terms of the Möbius sum; ⌊log2 x⌋ by default.
    #[arg(long, value_parser = positive_count, requires = "pi")]
    pub n: Option<u64>,
    /// Drop the constant and integral tails.
    #[arg(long, requires = "pi")]
    pub no_tails: bool,
    /// RMS of the ψ reconstruction error over LO + 1/2, ..., HI + 1/2.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = count, conflicts_with = "x")]
    pub rms: Option<Vec<u64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct ZerosArgs {
    /// Zero table to use, overriding --zeros.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
    /// Compare N(T) with its main term.
    #[arg(long, requires = "t")]
    pub check: bool,
    #[arg(long = "T", id = "t", value_name = "T")]
    pub t: Option<f64>,
}

#[derive(Debug, Args, Serialize, Clone, Copy)]
pub struct GridArgs {
    #[arg(long, value_parser = count)]
    pub lo: u64,
    #[arg(long, value_parser = count)]
    pub hi: u64,
    #[arg(long, value_parser = positive_count)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Interval length: `fixed:Y`, `power:BETA` or `log-power:DELTA`.
    #[arg(long, default_value = "power:0.5833333333333334")]
    pub rule: String,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.7, 1.3])]
    pub band: Vec<f64>,
    #[arg(long, default_value_t = 0.99)]
    pub almost_all: f64,
    #[arg(long)]
    pub allow_small_x: bool,
    /// Fail unless almost all ratios fall in the band.
    #[arg(long)]
    pub check: bool,
    /// Ratio statistics for y = (log x)^DELTA instead.
    #[arg(long, value_name = "DELTA", conflicts_with_all = ["rule", "check", "allow_small_x"])]
    pub maier: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct GapArgs {
    #[arg(long, value_parser = count, default_value = "1000")]
    pub lo: u64,
    #[arg(long, value_parser = count, default_value = "100000000")]
    pub hi: u64,
    #[arg(long, value_parser = positive_count, default_value = "10000")]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct VarianceArgs {
    #[arg(long, value_parser = count, requires = "y")]
    pub n: Option<u64>,
    #[arg(long, value_parser = count, requires = "n")]
    pub y: Option<u64>,
    #[arg(long, value_parser = positive_count, default_value = "1")]
    pub stride: u64,
    /// θ and ψ increment deviations at X over low-discrepancy lengths.
    #[arg(long, value_parser = count, value_name = "X", conflicts_with = "n")]
    pub increments: Option<u64>,
    #[arg(long, value_parser = positive_count, default_value = "32")]
    pub count: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub grid: ProfileGrid,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Compare against the envelope families; fails if x^{7/12} is exceeded.
    #[arg(long)]
    pub envelope: bool,
    /// Constant in the sub-exponential envelopes.
    #[arg(long, default_value_t = 1.0, requires = "envelope")]
    pub c: f64,
}

#[derive(Debug, Args, Serialize, Clone, Copy)]
pub struct ProfileGrid {
    #[arg(long, value_parser = count, default_value_t = errorfit::PROFILE_MIN)]
    pub lo: u64,
    #[arg(long, value_parser = count, default_value_t = errorfit::PROFILE_MAX)]
    pub hi: u64,
    #[arg(long, value_parser = positive_count, default_value_t = errorfit::DEFAULT_GRID_POINTS as u64)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub grid: ProfileGrid,
    #[command(flatten)]
    pub quad: QuadArgs,
}
