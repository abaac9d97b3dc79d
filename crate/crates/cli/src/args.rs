use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resknap_core::{ModeKind, PolicyKind, Rat};

#[derive(Debug, Parser)]
#[command(name = "resknap", version, about = "Online knapsack with reservation costs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one policy over an instance file.
    Simulate(SimulateArgs),
    /// Exact offline optimum of an instance file.
    Solve(SolveArgs),
    /// Play an adaptive lower-bound adversary against a policy.
    Adversary(AdversaryArgs),
    /// Emit the bound curves as CSV.
    BoundsCurve(BoundsCurveArgs),
    /// Check a policy's guarantee on seeded random batches.
    Verify(VerifyArgs),
    /// Measured and forced ratios across an alpha grid, as CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Size,
    Value,
}

impl From<ModeArg> for ModeKind {
    fn from(m: ModeArg) -> ModeKind {
        match m {
            ModeArg::Size => ModeKind::SizeProportional,
            ModeArg::Value => ModeKind::ValueProportional,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Alg1,
    Alg2,
    PackFirstFit,
    RejectAll,
    ReserveAll,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> PolicyKind {
        match p {
            PolicyArg::Alg1 => PolicyKind::Alg1,
            PolicyArg::Alg2 => PolicyKind::Alg2,
            PolicyArg::PackFirstFit => PolicyKind::PackFirstFit,
            PolicyArg::RejectAll => PolicyKind::RejectAll,
            PolicyArg::ReserveAll => PolicyKind::ReserveAll,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Size,
    Value,
}

/// Additive slack for size-mode verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaArg {
    FromLedger,
    Value(Rat),
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    s.trim().parse::<Rat>().map_err(|e| e.to_string())
}

pub fn parse_beta(s: &str) -> Result<BetaArg, String> {
    match s.trim() {
        "from-ledger" | "auto" => Ok(BetaArg::FromLedger),
        other => parse_rat(other).map(BetaArg::Value),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaList(pub Vec<Rat>);

pub fn parse_alpha_list(s: &str) -> Result<AlphaList, String> {
    s.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>().map(AlphaList)
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "value")]
    pub mode: ModeArg,
    #[arg(long, value_parser = parse_rat, default_value = "0.1")]
    pub alpha: Rat,
    /// Defaults to alg1 in size mode and alg2 in value mode.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Threshold factor; defaults to c* (alg2) or 1 + epsilon/4 (alg1).
    #[arg(long, value_parser = parse_rat)]
    pub c: Option<Rat>,
    #[arg(long, value_parser = parse_rat, default_value = "0.5")]
    pub epsilon: Rat,
    #[arg(long, value_parser = parse_rat, default_value = "0")]
    pub beta: Rat,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_rat, default_value = "1")]
    pub capacity: Rat,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdversaryArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_enum)]
    pub policy: PolicyArg,
    /// Must agree with the family when given.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_parser = parse_rat, default_value = "0.1")]
    pub alpha: Rat,
    #[arg(long, value_parser = parse_rat)]
    pub c: Option<Rat>,
    /// Size family: base of the item sizes 1/2 + epsilon^i.
    #[arg(long, value_parser = parse_rat, default_value = "0.01")]
    pub epsilon: Rat,
    /// Size family: value of the offered items.
    #[arg(long = "C", value_parser = parse_rat, default_value = "1e6")]
    pub big_c: Rat,
    /// Size family: additive constant of the non-strict ratio.
    #[arg(long, value_parser = parse_rat, default_value = "10")]
    pub beta: Rat,
    #[arg(long = "max-rounds")]
    pub max_rounds: Option<usize>,
    /// Value family: minimum rounds before a rejection is answered.
    #[arg(long = "N", default_value_t = 50)]
    pub n: usize,
    #[arg(long, value_parser = parse_rat, default_value = "0.05")]
    pub eps2: Rat,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsCurveArgs {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, value_parser = parse_rat, default_value = "0.1")]
    pub alpha: Rat,
    #[arg(long, value_parser = parse_rat)]
    pub c: Option<Rat>,
    /// Size mode: multiplicative slack of the guarantee 2 + epsilon.
    #[arg(long, value_parser = parse_rat, default_value = "0.5")]
    pub epsilon: Rat,
    /// Size mode: `from-ledger` or a number.
    #[arg(long, value_parser = parse_beta, default_value = "from-ledger")]
    pub beta: BetaArg,
    /// Number of random instances.
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    #[arg(long = "n-max", default_value_t = 50)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value mode: also play the value adversary with this N.
    #[arg(long = "game-n")]
    pub game_n: Option<usize>,
    #[arg(long, value_parser = parse_rat, default_value = "0.05")]
    pub eps2: Rat,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_alpha_list, default_value = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45")]
    pub alphas: AlphaList,
    /// Random instances per alpha.
    #[arg(long, default_value_t = 200)]
    pub n: u64,
    #[arg(long = "n-max", default_value_t = 50)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value adversary N.
    #[arg(long = "N", default_value_t = 10)]
    pub game_n: usize,
    #[arg(long, value_parser = parse_rat, default_value = "0.05")]
    pub eps2: Rat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
