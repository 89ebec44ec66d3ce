//! Command-line grammar. Every argument struct also (de)serializes, so a
//! `--config` file can override any flag by name.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "bacharach", version, about = "Cayley-Bacharach sets, jet defects, motivic series and smooth-hypersurface censuses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub globals: Globals,
}

#[derive(Args, Debug, Clone)]
pub struct Globals {
    /// Root seed for every random stream
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; does not affect output
    #[arg(long, global = true, env = "BACHARACH_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file whose keys override flags: seed, format, out, params
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Cayley-Bacharach checks on point files
    #[command(subcommand)]
    Cb(CbCommand),
    /// Jet (first-order neighborhood) interpolation
    #[command(subcommand)]
    Jets(JetsCommand),
    /// Truncated series in u = 1/L
    #[command(subcommand)]
    Zeta(ZetaCommand),
    /// Configuration-space counts and classes
    #[command(subcommand)]
    Classes(ClassesCommand),
    /// Smooth hypersurface censuses
    #[command(subcommand)]
    Census(CensusCommand),
    /// Tabulate psi_{e,d}(l)
    Psi(PsiArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CbCommand {
    Check(PointsArgs),
    Minimal(PointsArgs),
    Curve(CurveArgs),
    Hunt(HuntArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JetsCommand {
    Rank(PointsArgs),
    Defect(PointsArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaCommand {
    /// zeta_{P^n}(s) through u^prec
    Value(ZetaArgs),
    /// zeta_{P^n}(s)^{-1} through u^prec
    Inverse(ZetaArgs),
    /// prod_{k>=1} (1 - u^k) through u^prec
    Limit(LimitArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassesCommand {
    Wk(WkArgs),
    Wlambda(WlambdaArgs),
    Interp(InterpArgs),
    Propvw(PropvwArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusCommand {
    Run(CensusRunArgs),
    Decay(CensusDecayArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsArgs {
    /// Point file (`field p k` header, one point per line)
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub d: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveArgs {
    #[arg(long)]
    pub points: PathBuf,
    /// With `--d`, peel off the curve part of the jet defect
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub e_max: u32,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HuntArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 11)]
    pub q: u64,
    #[arg(long, default_value_t = 3)]
    pub d_min: u32,
    #[arg(long, default_value_t = 8)]
    pub d_max: u32,
    #[arg(long, default_value_t = 1)]
    pub e_min: u32,
    #[arg(long, default_value_t = 3)]
    pub e_max: u32,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Weights of the curve, complete-intersection and closure generators
    #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
    pub weights: Vec<u32>,
    #[arg(long, default_value_t = 14)]
    pub max_points: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: i64,
    #[arg(long)]
    pub prec: usize,
    /// Also report the count specialization L -> q
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitArgs {
    #[arg(long)]
    pub prec: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WkArgs {
    /// P<n>, A<n> or point
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub k: usize,
    /// Count over F_q instead of interpolating the class
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WlambdaArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpArgs {
    /// Samples `q:count`, comma separated; the last one is held out
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<String>,
    #[arg(long)]
    pub degree_bound: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropvwArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub q: u64,
    /// Largest configuration size N
    #[arg(long = "big-n")]
    pub big_n: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusRunArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub q: u64,
    /// Sample this many forms instead of enumerating all of them
    #[arg(long)]
    pub sample: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusDecayArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub d_min: u32,
    #[arg(long)]
    pub d_max: u32,
    #[arg(long)]
    pub sample: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub e: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub kconst: i64,
    #[arg(long, default_value_t = 1)]
    pub l_min: u64,
    #[arg(long)]
    pub l_max: u64,
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Cb(CbCommand::Check(_)) => "cb check",
            Command::Cb(CbCommand::Minimal(_)) => "cb minimal",
            Command::Cb(CbCommand::Curve(_)) => "cb curve",
            Command::Cb(CbCommand::Hunt(_)) => "cb hunt",
            Command::Jets(JetsCommand::Rank(_)) => "jets rank",
            Command::Jets(JetsCommand::Defect(_)) => "jets defect",
            Command::Zeta(ZetaCommand::Value(_)) => "zeta value",
            Command::Zeta(ZetaCommand::Inverse(_)) => "zeta inverse",
            Command::Zeta(ZetaCommand::Limit(_)) => "zeta limit",
            Command::Classes(ClassesCommand::Wk(_)) => "classes wk",
            Command::Classes(ClassesCommand::Wlambda(_)) => "classes wlambda",
            Command::Classes(ClassesCommand::Interp(_)) => "classes interp",
            Command::Classes(ClassesCommand::Propvw(_)) => "classes propvw",
            Command::Census(CensusCommand::Run(_)) => "census run",
            Command::Census(CensusCommand::Decay(_)) => "census decay",
            Command::Psi(_) => "psi",
        }
    }
}
