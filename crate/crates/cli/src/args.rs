use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cone-hankel",
    version,
    about = "Hankel and Toeplitz truncations over ordered lattices Z^d"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks on an order specification.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Operator truncations.
    #[command(subcommand)]
    Op(OpCmd),
    /// Singular-value studies over growing boxes.
    #[command(subcommand)]
    Study(StudyCmd),
    /// Bounded extensions of Hankel data.
    #[command(subcommand)]
    Nehari(NehariCmd),
    /// Randomized identity checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
pub enum OrderCmd {
    /// Validate the order axioms on a box and look for χ₁.
    Check(OrderCheckArgs),
}

#[derive(Debug, Subcommand)]
pub enum OpCmd {
    /// Assemble one truncation and export it as JSON + CSV.
    Build(BuildArgs),
    /// σ₁..σ_k over a list of radii.
    Norms(NormsArgs),
}

#[derive(Debug, Subcommand)]
pub enum StudyCmd {
    /// K₁ prediction against singular-value decay for H_φ.
    Compactness(CompactnessArgs),
    /// σ_min and column tails of square Hankel truncations.
    Fredholm(FredholmArgs),
}

#[derive(Debug, Subcommand)]
pub enum NehariCmd {
    /// Bracket ‖Γ‖ between σ₁ of a truncation and the best extension found.
    Gap(GapArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Run every identity on random seeded inputs.
    Identities(IdentitiesArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Directory receiving the artifacts.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Comma-separated subset of json,csv,plot.
    #[arg(long, default_value = "json,csv")]
    pub formats: String,
}

#[derive(Debug, Args)]
pub struct OrderCheckArgs {
    #[arg(long)]
    pub order: PathBuf,
    /// Box radius for the axiom check.
    #[arg(long, default_value_t = 4)]
    pub radius: i64,
    /// Box radius for the smallest-positive search.
    #[arg(long, default_value_t = 16)]
    pub search_radius: i64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Hankel,
    Hphi,
    Toeplitz,
    GammaPsi,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub order: PathBuf,
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub radius: i64,
    /// File stem of the exported pair; defaults to the kind.
    #[arg(long)]
    pub stem: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long)]
    pub order: PathBuf,
    #[arg(long)]
    pub symbol: PathBuf,
    /// Strictly increasing box radii, comma-separated.
    #[arg(long)]
    pub radii: String,
    #[arg(long, value_enum, default_value = "hankel")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CompactnessArgs {
    #[arg(long)]
    pub order: PathBuf,
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long)]
    pub radii: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// σ_k ≥ ratio·σ₁ counts towards a plateau.
    #[arg(long, default_value_t = 0.5)]
    pub plateau_ratio: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    /// The file holds Hankel data on X₊.
    Data,
    /// The file holds a symbol φ; truncations are re-indexed H_φ sections.
    Symbol,
}

#[derive(Debug, Args)]
pub struct FredholmArgs {
    #[arg(long)]
    pub order: PathBuf,
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long)]
    pub radii: String,
    #[arg(long, value_enum, default_value = "data")]
    pub source: SourceArg,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// σ_min below threshold·σ₁ counts as vanishing.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub order: PathBuf,
    /// Hankel data on X₊.
    #[arg(long)]
    pub symbol: PathBuf,
    /// Box radius of the truncation giving the lower bound.
    #[arg(long, default_value_t = 64)]
    pub radius: i64,
    /// Free coefficients on X₋ ∩ [−D, D]^d.
    #[arg(long, default_value_t = 12)]
    pub degree: i64,
    /// Maximum number of descent sweeps.
    #[arg(long, default_value_t = 500)]
    pub budget: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    #[arg(long)]
    pub order: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: Output,
}
