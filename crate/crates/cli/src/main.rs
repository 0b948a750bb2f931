mod bench;
mod check;
mod gen;
mod report;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vcsp::VcspError;

/// Exit codes: 0 ok, 1 failed bench assertion or internal error, 2 infeasible,
/// 3 budget or size cap exceeded, 4 input error.
#[derive(Parser)]
#[command(name = "vcsp", version, about = "Exact and approximate solvers for valued constraint satisfaction problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print a result JSON.
    Solve(SolveArgs),
    /// Classify the right-hand structure of an instance, or compare left structures.
    Check(CheckArgs),
    /// Generate an instance file from a template.
    Gen(GenArgs),
    /// Run a benchmark suite and write CSV rows `case,algo,eps,level,value,oracle,ratio,ms`.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Naive,
    Dp,
    Ptas,
    Baker,
    Sa,
    Fragile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    None,
    Naive,
    Dp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LpArg {
    Rational,
    Float,
    Auto,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Accuracy for ptas and baker, as a rational such as `1/2`.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    /// Sherali-Adams level; defaults to the maximum arity.
    #[arg(long)]
    pub level: Option<usize>,
    /// Recorded in the report; solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Work cap for the exact solvers.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, value_enum, default_value = "none")]
    pub oracle: Oracle,
    /// Also write the result JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub lp: LpArg,
    /// Apex elements (comma-separated ids) deleted before layering in the baker game.
    #[arg(long)]
    pub apex: Option<String>,
    /// Width at which the baker game solves a subproblem exactly.
    #[arg(long)]
    pub base_width: Option<usize>,
    /// Modulator JSON for fragile: `{"width": k, "parts": [{"set": [ids], "p": "1/2"}]}`.
    #[arg(long)]
    pub modulator: Option<PathBuf>,
    /// Omit wall-clock time from the output.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Classify the right-hand structure of this instance.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Search for an overcast between the left structures of two instances.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub overcast: Option<Vec<PathBuf>>,
    /// Certify opt-distance at most `--epsilon` between the left structures of two instances.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub dopt: Option<Vec<PathBuf>>,
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    /// Cap on enumerated partial maps.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Template {
    VcGrid,
    IsGrid,
    Path,
    Cycle,
    Clique,
    LoopClique,
    Coloring,
    CliqueReduction,
    RandomMinsol,
    RandomMaxsol,
    ApexGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RightArg {
    /// Vertex cover (minimisation).
    Vc,
    /// Independent set (maximisation).
    Is,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub template: Template,
    #[arg(long, default_value_t = 4)]
    pub rows: usize,
    #[arg(long, default_value_t = 4)]
    pub cols: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Number of colours for `coloring` and `clique`.
    #[arg(long)]
    pub i: Option<usize>,
    /// Right-hand structure for `path` and `cycle`.
    #[arg(long, value_enum, default_value = "vc")]
    pub right: RightArg,
    /// Right domain size for the random templates.
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    /// Edge probability for the random templates.
    #[arg(long, default_value_t = 0.4)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    MinPtasGrids,
    BakerApex,
    SaExactness,
    SaLinearity,
    DualityRoundtrip,
    OracleConcordance,
    CliqueReduction,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random cases for the randomised suites.
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the `ms` column empty so that output is byte-identical across runs.
    #[arg(long)]
    pub no_timing: bool,
}

pub fn exit_code(e: &VcspError) -> u8 {
    match e {
        VcspError::Budget { .. } | VcspError::SizeCap(_) => 3,
        VcspError::Input(_) | VcspError::SignatureMismatch(..) | VcspError::MixedInfinities(..) | VcspError::NotDiagonalisable => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Command::Solve(a) => solve::run(&a),
        Command::Check(a) => check::run(&a),
        Command::Gen(a) => gen::run(&a),
        Command::Bench(a) => bench::run(&a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
