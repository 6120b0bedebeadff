use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "sbl", version, about = "Separators, bandwidth and embeddings of bounded-degree graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random near-Ramanujan regular graphs.
    #[command(subcommand)]
    Expander(ExpanderCmd),
    /// Separator/broom construction.
    #[command(subcommand)]
    Hrt(HrtCmd),
    /// Exact bandwidth and certified lower bounds.
    #[command(subcommand)]
    Bw(BwCmd),
    /// Host graphs and non-embeddability certificates.
    #[command(subcommand)]
    Host(HostCmd),
    /// Embedding into dense hosts.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Parameter grid, one CSV row per point.
    Sweep(SweepArgs),
}

/// Seed flag shared by every randomized command.
#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct SeedArg {
    #[arg(long, env = "SBL_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArg {
    /// Report file; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExpanderCmd {
    Gen(ExpanderGen),
    Verify(ExpanderVerify),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExpanderGen {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub r: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 20)]
    pub max_resamples: usize,
    /// Slack over 2 sqrt(r-1); default 0.05 sqrt(r-1).
    #[arg(long)]
    pub eig_tolerance: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExpanderVerify {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Random (A, B) pairs for the mixing check, thirds pairs and cover subsets.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Subcommand)]
pub enum HrtCmd {
    Build(HrtBuild),
    Verify(HrtVerify),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HrtBuild {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub k: Option<usize>,
    /// Separability target used to choose k.
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HrtVerify {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Subcommand)]
pub enum BwCmd {
    Exact(BwExact),
    Bound(BwBound),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BwExact {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Placement budget of the branch and bound.
    #[arg(long, default_value_t = 10_000_000)]
    pub limit: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BwBound {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub probes: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Subcommand)]
pub enum HostCmd {
    Layered(HostLayered),
    Twoclique(HostTwoClique),
    ProbeRobust(HostProbe),
    CertifyNonembed(HostCertify),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HostLayered {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HostTwoClique {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HostProbe {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.002)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.2)]
    pub tau: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HostCertify {
    #[arg(long)]
    pub t: usize,
    /// Layered host, or any host when `--guest` is given.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Guest of the same order; switches to exhaustive search.
    #[arg(long)]
    pub guest: Option<PathBuf>,
    #[arg(long, default_value_t = 50_000_000)]
    pub limit: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Subcommand)]
pub enum EmbedCmd {
    Pipeline(EmbedPipeline),
    Dense(EmbedDense),
    Exact(EmbedExact),
    /// Host with a planted regular partition.
    Planted(EmbedPlanted),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedPipeline {
    #[arg(long)]
    pub guest: PathBuf,
    #[arg(long)]
    pub host: PathBuf,
    /// Partition JSON; otherwise the host's component labels are used.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub c: f64,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    /// First-vertex neighbor threshold as a fraction of the cluster size;
    /// defaults to `c`.
    #[arg(long)]
    pub first_threshold: Option<f64>,
    /// Cap on vertices moved into one cluster, as a fraction of its size.
    #[arg(long)]
    pub reassign_cap: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedDense {
    #[arg(long)]
    pub guest: PathBuf,
    #[arg(long)]
    pub host: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 50)]
    pub retries: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedExact {
    #[arg(long)]
    pub guest: PathBuf,
    #[arg(long)]
    pub host: PathBuf,
    #[arg(long, default_value_t = 10_000_000)]
    pub limit: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedPlanted {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    #[arg(long, default_value_t = 0.3)]
    pub delta_super: f64,
    #[arg(long, default_value_t = 0.62)]
    pub pair_density: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.55)]
    pub min_degree_fraction: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    /// Host JSON; cluster labels go into its component map.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 20)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub pipeline_runs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
