mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ogj::OgjError;

#[derive(Parser)]
#[command(name = "ogj", version, about = "Optimal graph joinings: exact costs, isomorphism detection, sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check that a graph document is a valid weight function.
    Validate { graph: PathBuf },
    /// Optimal joining cost under a labeling scheme.
    Cost {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "primary")]
        scheme: String,
    },
    /// Solve the joining LP and report an optimal vertex.
    Solve {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "primary")]
        scheme: String,
        /// Rational cost matrix file, overriding the scheme cost.
        #[arg(long)]
        cost: Option<PathBuf>,
    },
    /// Decide isomorphism from the optimal face.
    Detect {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "primary")]
        scheme: String,
        #[arg(long, default_value_t = ogj::lp::DEFAULT_FACE_CAP)]
        cap: usize,
        /// Fall back to exhaustive search when the cost is zero but nothing is certified.
        #[arg(long)]
        brute_force: bool,
    },
    /// List the isomorphisms induced by bijective optimal extreme points.
    Identify {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "primary")]
        scheme: String,
        #[arg(long, default_value_t = ogj::lp::DEFAULT_FACE_CAP)]
        cap: usize,
    },
    /// Color refinement on the underlying simple graphs plus the lazy-transform cost sign.
    Wl {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "3/4")]
        delta: String,
    },
    /// Metric axioms of the kappa-distance over a list of graphs on a common vertex set.
    Metric {
        graphs: PathBuf,
        cost: PathBuf,
        #[arg(long, default_value_t = 1)]
        kappa: u32,
    },
    /// Generate a graph from one of the covered families.
    Generate {
        /// tree | forest | flower | connected | simple
        family: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Component sizes for forests, e.g. 3,4.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Cycle lengths for flowers, e.g. 4,6.
        #[arg(long, value_delimiter = ',')]
        cycles: Vec<usize>,
        /// Extra edges beyond a spanning tree (connected family).
        #[arg(long, default_value_t = 0)]
        extra: usize,
        /// Edge probability for the simple family.
        #[arg(long, default_value = "1/2")]
        p: String,
        /// Edge weights are drawn from 1..=weights.
        #[arg(long, default_value_t = 1)]
        weights: i64,
        /// Primary labels are drawn from 0..labels.
        #[arg(long, default_value_t = 1)]
        labels: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Glue connected parts along leaves into a magic set M.
    Glue {
        spec: PathBuf,
        /// Attach magic labels for this base scheme and check the decomposition.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Split a joining of two disconnected graphs into component blocks.
    Decompose { g: PathBuf, h: PathBuf, joining: PathBuf },
    /// Run a property sweep and print the per-trial table.
    Sweep {
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ogj::lp::DEFAULT_FACE_CAP)]
        cap: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Error = 1,
    Invalid = 2,
    SuiteFailed = 3,
    CapExceeded = 4,
}

fn error_status(e: &anyhow::Error) -> Status {
    match e.chain().find_map(|c| c.downcast_ref::<OgjError>()) {
        Some(
            OgjError::Parse(_)
            | OgjError::InvalidWeights(_)
            | OgjError::InvalidGraph(_)
            | OgjError::ZeroMass
            | OgjError::NotFullySupported(_)
            | OgjError::VertexMismatch(_)
            | OgjError::UnknownScheme(_)
            | OgjError::UnknownSweep(_)
            | OgjError::OutOfRange(_)
            | OgjError::InvalidJoining(_)
            | OgjError::InvalidGluing(_)
            | OgjError::NotAMetric(_)
            | OgjError::SchemeInapplicable(_)
            | OgjError::Json(_),
        ) => Status::Invalid,
        _ => Status::Error,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_status(&e) as u8)
        }
    }
}
