//! `tropibary`: JSON front end for the max-plus measure library.

mod commands;
mod docs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tropibary::TropScalar;

/// Exit status for a completed run whose checks did not all pass.
pub const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "tropibary", version, about = "Idempotent measures, barycenters and lifts over the max-plus semiring")]
pub struct Cli {
    /// Accept non-normalized weights by subtracting their maximum.
    #[arg(long, global = true)]
    pub renormalize: bool,

    /// Add wall-clock timing to reports. Reports are then no longer byte-stable.
    #[arg(long, global = true)]
    pub timing: bool,

    /// Pretty-print JSON reports.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate a measure on a function table.
    Eval {
        #[arg(long)]
        measure: String,
        /// JSON array of finite values, one per point of the space.
        #[arg(long)]
        phi: String,
    },
    /// `t ⊙ λ ⊕ p ⊙ β`.
    Combine {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        beta: String,
        /// `{"t": ..., "p": ...}`.
        #[arg(long)]
        params: String,
    },
    /// Push a measure forward along a map of finite spaces.
    Pushforward {
        #[arg(long)]
        measure: String,
        /// `[f(0), f(1), ...]` or `{"targets": [...], "codomain": k}`.
        #[arg(long)]
        map: String,
        #[arg(long)]
        codomain: Option<usize>,
    },
    /// Barycenter of a measure on points.
    Barycenter {
        measure: String,
        /// Also report membership of the barycenter in this polytope.
        #[arg(long)]
        in_polytope: Option<String>,
    },
    /// Constructive lifts.
    Lift {
        #[command(subcommand)]
        kind: LiftKind,
    },
    /// Barycenter-preserving approximation over a cover.
    Approx(ApproxArgs),
    /// Extremal points of a polytope.
    Ext {
        #[arg(long)]
        polytope: String,
        /// Render a 2-d polytope with its extremal points.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Membership of a point in a polytope.
    Member {
        #[arg(long)]
        polytope: String,
        #[arg(long)]
        point: String,
    },
    /// Seeded certificates for the two non-openness examples.
    Counterexample {
        #[command(subcommand)]
        which: CounterexampleKind,
    },
    /// Run verification suites.
    Verify {
        /// `all` or one suite name.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ScaleArg::Default)]
        scale: ScaleArg,
        /// Also write the rows as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Inject a deliberate fault to check that the suites notice.
        #[arg(long, value_enum)]
        fault: Option<FaultArg>,
    },
}

#[derive(Subcommand)]
pub enum LiftKind {
    /// Lift through `s` on finite spaces, intervals or boxes.
    S(LiftArgs),
    /// Lift through the barycenter map on a box.
    Beta(LiftArgs),
    /// Pull `(μ, a)` back along a surjection given `ν` upstairs.
    Fiber {
        #[arg(long)]
        instance: String,
    },
}

#[derive(Args)]
pub struct LiftArgs {
    #[arg(long)]
    pub instance: String,
    #[arg(long)]
    pub target: String,
    /// Compare against an exhaustive grid search.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct ApproxArgs {
    #[command(subcommand)]
    pub sweep: Option<ApproxSweep>,
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long)]
    pub cover: Option<String>,
}

#[derive(Subcommand)]
pub enum ApproxSweep {
    /// Distances along a refining chain of covers, as CSV.
    Sweep {
        #[arg(long)]
        measure: String,
        /// JSON list of covers, coarsest first.
        #[arg(long, conflicts_with = "dyadic")]
        chain: Option<String>,
        /// Dyadic box covers of `[lo, hi]^d` with this many levels.
        #[arg(long, requires_all = ["lo", "hi"])]
        dyadic: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<TropScalar>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<TropScalar>,
    },
}

#[derive(Subcommand)]
pub enum CounterexampleKind {
    /// `id ⊕` is not open at `(δ_0, δ_1)`.
    IdOplus(CertArgs),
    /// The barycenter map of `Y` is not open.
    YBeta(CertArgs),
    /// Re-check a stored certificate.
    Replay { certificate: String },
}

#[derive(Args)]
pub struct CertArgs {
    #[arg(long = "i")]
    pub i: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Default,
    Tiny,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FaultArg {
    TamperCombine,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let help = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            return ExitCode::from(if help { 0 } else { 1 });
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let refusal = e.downcast_ref::<tropibary::Error>().is_some_and(tropibary::Error::is_validity_refusal);
            ExitCode::from(if refusal { 2 } else { 1 })
        }
    }
}
