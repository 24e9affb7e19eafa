//! `bunkbed`: exact and sampled bunkbed gaps from the command line.
//!
//! Exit codes: 0 success, 2 usage, 3 verification mismatch, 4 uncertified
//! sign, 5 conjecture violation found.

mod commands;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bunkbed", version, about = "Bunkbed percolation: kernels, gadgets and gap certificates")]
pub struct Cli {
    /// Emit a JSON run record instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for enumeration; defaults to BUNKBED_WORKERS or 1.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Terminal kernel of the n-fan gadget.
    GadgetKernel {
        #[arg(short)]
        n: usize,
        #[arg(short, value_name = "RAT")]
        p: String,
        /// Also report whether the 400-margin condition holds.
        #[arg(long = "check-390")]
        check_390: bool,
        /// Compare with brute-force enumeration (n <= 6).
        #[arg(long)]
        oracle: bool,
    },
    /// Alternative-model probabilities on Hollom's hypergraph.
    HollomCheck,
    /// Gap of the gadget-substituted Hollom graph.
    Counterexample {
        #[arg(short)]
        n: usize,
        #[arg(short, value_name = "RAT")]
        p: String,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Starting precision in interval mode; doubled until the sign is certified.
        #[arg(long, default_value_t = 256)]
        bits: u32,
    },
    /// Gap of one bunkbed instance.
    Gap(GapArgs),
    /// Scan graph6 files over transversal sets and pole pairs.
    BatchScan(ScanArgs),
    /// Gap when posts are also random with probability 1/2.
    CompleteBbc {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, num_args = 2, value_names = ["U", "V"], required = true)]
        poles: Vec<usize>,
    },
    /// Build the cloned counterexample for the complete variant.
    CloneBuild {
        #[arg(long)]
        k: usize,
        /// Write the edge list here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reproduction checks.
    VerifyPaper {
        /// Only these criteria (1 to 11).
        #[arg(long)]
        criterion: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GapMethod {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum McModel {
    Standard,
    Alternative,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Edge-list file: header `n m`, then `u v p` lines.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub graph6: Option<String>,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Comma-separated transversal vertices; empty for none.
    #[arg(long, default_value = "")]
    pub transversal: String,
    #[arg(long, num_args = 2, value_names = ["U", "V"], required = true)]
    pub poles: Vec<usize>,
    /// Uniform edge probability, replacing the graph's own.
    #[arg(short, long, value_name = "RAT")]
    pub p: Option<String>,
    #[arg(long, value_enum, default_value_t = GapMethod::Exact)]
    pub method: GapMethod,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = McModel::Standard)]
    pub model: McModel,
    /// Stop sampling once |gap| exceeds this many standard errors.
    #[arg(long)]
    pub early_stop: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_name = "PATH")]
    pub graph6_file: PathBuf,
    #[arg(long)]
    pub max_vertices: Option<usize>,
    #[arg(short, long, value_name = "RAT", default_value = "1/2")]
    pub p: String,
    /// Scan every transversal set (the default unless --transversal is given).
    #[arg(long)]
    pub all_transversals: bool,
    /// A transversal set to scan, comma-separated; repeatable.
    #[arg(long, conflicts_with = "all_transversals")]
    pub transversal: Vec<String>,
    /// Emit a record for every instance, not only violations.
    #[arg(long)]
    pub verbose: bool,
    /// Write JSON lines here as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
