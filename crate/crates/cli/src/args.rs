//! Command-line schema. Every long flag doubles as a key of the config file.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const OUT_DIR_ENV: &str = "LOWLYING_OUT_DIR";

#[derive(Parser, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[command(name = "lowlying", version, about = "One-level density of Dirichlet L-function zeros at desk scale")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Global {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Directory for artifacts [env: LOWLYING_OUT_DIR, default: lowlying-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Zero cache directory [default: <out>/cache].
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Recompute zeros even when cached.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Test-function family: `bump` or `table`.
    #[arg(long, global = true)]
    pub tf_family: Option<String>,
    /// Support radius σ of the test function [default: 1].
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Exponent k of the bump (1 − (x/σ)²)^k [default: 3].
    #[arg(long, global = true)]
    pub power: Option<u32>,
    /// Two-column CSV (x, f(x)) on [0, σ] for the `table` family.
    #[arg(long, global = true)]
    pub tf_file: Option<PathBuf>,
    /// Prime-table limit X [default: the smallest limit the command needs].
    #[arg(long, global = true)]
    pub table_limit: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Characters mod q with order, parity and conductor.
    Chars(CharsArgs),
    /// Zeros of L(s, χ) for every χ mod q up to height T.
    Zeros(ZerosArgs),
    /// Prime side of the one-level density and closed-form predictions.
    Density(DensityArgs),
    /// Zero side against prime side for the family mod q.
    VerifyExplicit(VerifyArgs),
    /// Reciprocal-totient sums, direct against asymptotic.
    Lemma24(Lemma24Args),
    /// Catalog of constants with error bounds.
    Constants(ConstantsArgs),
    /// Variance of primes in progressions summed over moduli.
    Variance(VarianceArgs),
    /// Class-one variance against the full range variance.
    Deavg(DeavgArgs),
    /// Size of ψ(x;q,1) − ψ(x)/φ(q) across moduli, with a fitted exponent.
    Montgomery(MontgomeryArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CharsArgs {
    pub q: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ZerosArgs {
    pub q: Option<u64>,
    /// Height T [default: 60].
    #[arg(long)]
    pub height: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DensityArgs {
    /// Single modulus; the scale is Q = q.
    #[arg(long, conflicts_with = "range")]
    pub q: Option<u64>,
    /// Average over q ∈ (Q/2, Q] at scale Q.
    #[arg(long)]
    pub range: Option<f64>,
    /// Weight every modulus equally instead of every character.
    #[arg(long)]
    pub weighted: bool,
    /// Predictions to evaluate, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sources: Vec<String>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub inner_edge: Option<f64>,
    #[arg(long)]
    pub mu0_a: Option<i64>,
    #[arg(long)]
    pub mu0_m: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerifyArgs {
    #[arg(long)]
    pub q: Option<u64>,
    /// Height T [default: 60].
    #[arg(long)]
    pub height: Option<f64>,
    /// Multiple of 1/φ(q) allowed on top of the zero tail bound [default: 3].
    #[arg(long)]
    pub explicit_slack: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Lemma24Args {
    /// Values of R [default: 1e2,1e3,1e4,1e5].
    #[arg(long = "R", value_delimiter = ',')]
    pub r: Vec<f64>,
    /// `plain`, `polynomial` or `halved` [default: plain].
    #[arg(long)]
    pub variant: Option<String>,
    /// Coefficients of P(u), constant term first.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coeffs: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstantsArgs {
    /// Truncation prime of the explicit parts [default: catalog value].
    #[arg(long)]
    pub p0: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VarianceArgs {
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long = "Q", value_delimiter = ',')]
    pub q_max: Vec<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DeavgArgs {
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long = "Q", value_delimiter = ',')]
    pub q_max: Vec<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MontgomeryArgs {
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u64>,
    /// Use the triangle-weighted ψ2 and only q ≤ √x.
    #[arg(long)]
    pub smoothed: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chars(_) => "chars",
            Command::Zeros(_) => "zeros",
            Command::Density(_) => "density",
            Command::VerifyExplicit(_) => "verify-explicit",
            Command::Lemma24(_) => "lemma24",
            Command::Constants(_) => "constants",
            Command::Variance(_) => "variance",
            Command::Deavg(_) => "deavg",
            Command::Montgomery(_) => "montgomery",
            Command::Replay(_) => "replay",
        }
    }
}
