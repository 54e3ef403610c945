//! Command-line front end for the `fusionframes` library.
//!
//! Four subcommands: `analyze` builds projections from stored subspaces
//! and reports on the family operator, `construct` runs the library's
//! constructions and writes the results, `verify` checks explicit
//! projection matrices against a target, and `gen` produces seeded
//! random test data. Exit codes: 0 success/pass, 1 usage or input
//! error, 2 analytic failure (not a frame, target not met).

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fusionframes::construct::WeightRule;
use fusionframes::Tolerances;

pub mod commands;
pub mod format;

#[derive(Parser, Debug)]
#[command(name = "fusionframes", version, about = "Fusion frames from oblique projections")]
pub struct Cli {
    /// Relative rank threshold for basis and pivot decisions.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,
    /// Entrywise agreement threshold.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_eq: f64,
    /// Eigenvalue threshold separating frames from non-frames.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_eig: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build one projection per stored subspace and report on the family.
    Analyze {
        /// Subspace file (JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// Report file to write (JSON).
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a construction and write projections, weights and a report.
    #[command(subcommand)]
    Construct(ConstructKind),
    /// Check explicit projection matrices against a target.
    Verify {
        /// Projection file (JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// Expected operator multiple for --target tight or identity.
        #[arg(long)]
        constant: Option<f64>,
        /// Report file to write; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate seeded random test data.
    #[command(subcommand)]
    Gen(GenKind),
}

/// How each stored subspace becomes a projection.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Orthogonal projection onto each subspace.
    Orthogonal,
    /// Coordinate nullspace chosen so the Gram matrix is block-supported.
    BlockSparse,
    /// Same support, reported with the reordering that makes it triangular.
    Triangular,
    /// Projection along the nullspace stored with each subspace.
    Oblique,
}

/// What `verify` asserts about the assembled operator.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Smallest eigenvalue strictly positive.
    Frame,
    /// Operator is a positive multiple of the identity.
    Tight,
    /// Operator is diagonal.
    Diagonal,
    /// Operator equals a prescribed multiple of the identity (default 1).
    Identity,
}

#[derive(Subcommand, Debug)]
pub enum ConstructKind {
    /// Parseval family of rank-one projections from a CSV frame
    /// (one vector per row).
    Parseval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleArg::PerVector)]
        rule: RuleArg,
        /// Directory for projections.json, report.json, parseval.json.
        #[arg(long)]
        output: PathBuf,
    },
    /// Single projection whose Gram matrix has prescribed diagonal entries.
    Diagonal {
        /// Ambient dimension N.
        #[arg(long)]
        ambient: usize,
        /// Kept coordinate axes, comma separated, 0-based.
        #[arg(long, value_delimiter = ',')]
        kept: Vec<usize>,
        /// Requested Gram diagonal entry per kept axis (each >= 1).
        #[arg(long, value_delimiter = ',')]
        entries: Vec<f64>,
        /// Positions into --kept allowed to exceed one (optional).
        #[arg(long, value_delimiter = ',')]
        adjustable: Option<Vec<usize>>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Two projections onto a stored subspace summing to twice the identity.
    TightPair {
        /// Subspace file with exactly one subspace, dim k, ambient N <= 2k.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// L projections summing to L times the identity, either on the
    /// coordinate chain subspace (--k, --levels) or transported to a
    /// stored subspace whose dimension divides the ambient (--input).
    TightChain {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, conflicts_with_all = ["k", "levels"])]
        input: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Chain family when the subspace dimension k does not divide N:
    /// N = k * levels + residue, spectrum reported as achieved.
    ResidualChain {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        residue: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Weight rule for the Parseval construction.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleArg {
    /// Each vector weighted from its own norms.
    PerVector,
    /// Vectors sharing an axis share one weight.
    GroupSum,
}

impl From<RuleArg> for WeightRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::PerVector => WeightRule::PerVector,
            RuleArg::GroupSum => WeightRule::GroupSum,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Random frame vectors as CSV, one vector per row.
    Frame {
        #[arg(long)]
        ambient: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Random subspaces (one per entry of --dims) as a subspace file.
    Subspace {
        #[arg(long)]
        ambient: usize,
        /// Subspace dimensions, comma separated.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also store a random complementary nullspace per subspace.
        #[arg(long)]
        with_nullspaces: bool,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Dispatches a parsed command line; the returned code is the process
/// exit status.
pub fn run(cli: &Cli) -> Result<i32> {
    let tol = Tolerances::new(cli.tol_rank, cli.tol_eq, cli.tol_eig)
        .context("tolerance flags must be finite and positive")?;
    match &cli.command {
        Command::Analyze { input, strategy, output } => {
            commands::cmd_analyze(input, *strategy, &tol, output)
        }
        Command::Construct(kind) => commands::cmd_construct(kind, &tol),
        Command::Verify { input, target, constant, output } => {
            commands::cmd_verify(input, *target, *constant, &tol, output.as_deref())
        }
        Command::Gen(kind) => commands::cmd_gen(kind, &tol),
    }
}
