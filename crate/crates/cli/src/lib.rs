//! Command-line harness around the `nfft` crate.
//!
//! Subcommands apply transforms to binary files, sweep the window width against
//! the direct sums (CSV), time transforms across thread counts and box sizes
//! (JSON lines), and generate seeded node and signal files.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use nfft::{NfftError, PrecomputeKind};

pub mod commands;
pub mod io;

pub use commands::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Nfft(#[from] NfftError),
}

impl CliError {
    /// 2 for unreadable or inconsistent inputs, 3 for rejected transform parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(..) | CliError::Format(_) | CliError::Usage(_) => 2,
            CliError::Nfft(NfftError::ShapeMismatch { .. } | NfftError::NonFiniteNode { .. }) => 2,
            CliError::Nfft(_) => 3,
        }
    }
}

/// Grid extents, written `32,32` or `32x32`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

impl FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = s
            .split([',', 'x'])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad extent {p:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if parts.is_empty() || parts.len() > 255 {
            return Err("expected 1 to 255 extents".into());
        }
        Ok(Dims(parts))
    }
}

/// Inclusive window-width range `A:B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange(pub usize, pub usize);

impl FromStr for MRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or("expected A:B")?;
        let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
        if a > b {
            return Err(format!("empty range {a}:{b}"));
        }
        Ok(MRange(a, b))
    }
}

/// Box edge lengths: `default`, `single` (one box spanning the oversampled grid),
/// one length for every dimension, or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockSpec {
    Default,
    Single,
    Uniform(usize),
    Explicit(Vec<usize>),
}

impl FromStr for BlockSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(BlockSpec::Default),
            "single" => Ok(BlockSpec::Single),
            _ if !s.contains(',') => s
                .parse()
                .map(BlockSpec::Uniform)
                .map_err(|e| format!("{e}")),
            _ => Dims::from_str(s).map(|d| BlockSpec::Explicit(d.0)),
        }
    }
}

impl BlockSpec {
    /// Concrete edge lengths for an oversampled grid `ntilde`, `None` for the defaults.
    pub fn resolve(&self, ntilde: &[usize]) -> Result<Option<Vec<usize>>, CliError> {
        match self {
            BlockSpec::Default => Ok(None),
            BlockSpec::Single => Ok(Some(ntilde.to_vec())),
            BlockSpec::Uniform(b) => Ok(Some(vec![*b; ntilde.len()])),
            BlockSpec::Explicit(b) if b.len() == ntilde.len() => Ok(Some(b.clone())),
            BlockSpec::Explicit(b) => Err(CliError::Usage(format!(
                "block size has {} entries for a {}-dimensional grid",
                b.len(),
                ntilde.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NodeKind {
    Uniform,
    Equispaced,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Parser)]
#[command(
    name = "nfft",
    version,
    about = "Nonequispaced FFT transforms, accuracy sweeps and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a direct or adjoint transform to a signal file.
    Transform(TransformArgs),
    /// Compare transforms against the direct sums over a range of window widths (CSV).
    Accuracy(AccuracyArgs),
    /// Time transforms across thread counts and box sizes (JSON lines).
    Bench(BenchArgs),
    /// Write a seeded node file.
    GenNodes(GenNodesArgs),
    /// Write a seeded signal file.
    GenSignal(GenSignalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    /// Window half-width.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    /// Oversampling factor.
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Window precomputation: full, tensor, linear or polynomial.
    #[arg(long, default_value = "polynomial")]
    pub precompute: PrecomputeKind,
    /// Box edge lengths (`default`, `single`, `16` or `64,64`).
    #[arg(long, default_value = "default")]
    pub block_size: BlockSpec,
    #[arg(long, default_value_t = default_threads())]
    pub threads: usize,
    /// Merge adjoint boxes in a fixed order.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// Node file.
    #[arg(long)]
    pub nodes: PathBuf,
    /// Input signal: grid values for the direct transform, node values for the adjoint.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Grid extents; required with `--adjoint`.
    #[arg(long)]
    pub dims: Option<Dims>,
    /// Run the adjoint transform.
    #[arg(long)]
    pub adjoint: bool,
    /// Also compute the relative error against the direct sum.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AccuracyArgs {
    #[arg(long, default_value = "32,32")]
    pub dims: Dims,
    /// Node count; defaults to the grid size.
    #[arg(long)]
    pub num_nodes: Option<usize>,
    /// Single window half-width.
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<usize>,
    /// Inclusive range of window half-widths.
    #[arg(long, default_value = "2:8")]
    pub m_range: MRange,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Comma-separated strategies; all four by default.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "full,tensor,linear,polynomial"
    )]
    pub precompute: Vec<PrecomputeKind>,
    #[arg(long, default_value_t = default_threads())]
    pub threads: usize,
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "262144")]
    pub dims: Dims,
    /// Node count; defaults to the grid size.
    #[arg(long)]
    pub num_nodes: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    #[arg(long, default_value = "polynomial")]
    pub precompute: PrecomputeKind,
    /// Comma-separated thread counts.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    /// Box sizes to sweep; repeat the flag for several.
    #[arg(long, default_value = "default")]
    pub block_size: Vec<BlockSpec>,
    #[arg(long)]
    pub adjoint: bool,
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Wall-clock budget per configuration.
    #[arg(long, default_value_t = 10.0)]
    pub trials_budget_secs: f64,
    /// Upper bound on repetitions per configuration.
    #[arg(long)]
    pub trials: Option<usize>,
    /// JSON-lines destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenNodesArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub kind: NodeKind,
    /// Grid extents: the dimension for uniform nodes, the lattice for equispaced ones.
    #[arg(long)]
    pub dims: Dims,
    /// Node count for uniform nodes; defaults to the grid size.
    #[arg(long)]
    pub num_nodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("shape").required(true).args(["dims", "num_nodes"])))]
pub struct GenSignalArgs {
    /// Grid extents of a grid-domain signal.
    #[arg(long)]
    pub dims: Option<Dims>,
    /// Length of a node-domain vector.
    #[arg(long)]
    pub num_nodes: Option<usize>,
    /// Write zeros instead of random values.
    #[arg(long)]
    pub zero: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dims_ranges_and_blocks() {
        assert_eq!("32,16".parse::<Dims>().unwrap(), Dims(vec![32, 16]));
        assert_eq!("8x8x8".parse::<Dims>().unwrap(), Dims(vec![8, 8, 8]));
        assert!("8,a".parse::<Dims>().is_err());
        assert_eq!("3:8".parse::<MRange>().unwrap(), MRange(3, 8));
        assert!("8:3".parse::<MRange>().is_err());
        assert!("5".parse::<MRange>().is_err());
        assert_eq!("single".parse::<BlockSpec>().unwrap(), BlockSpec::Single);
        assert_eq!("16".parse::<BlockSpec>().unwrap(), BlockSpec::Uniform(16));
        assert_eq!(
            "64,32".parse::<BlockSpec>().unwrap(),
            BlockSpec::Explicit(vec![64, 32])
        );
        assert_eq!(
            BlockSpec::Single.resolve(&[64, 32]).unwrap(),
            Some(vec![64, 32])
        );
        assert_eq!(
            BlockSpec::Uniform(4).resolve(&[64, 32]).unwrap(),
            Some(vec![4, 4])
        );
        assert_eq!(BlockSpec::Default.resolve(&[64]).unwrap(), None);
        assert!(BlockSpec::Explicit(vec![4]).resolve(&[64, 32]).is_err());
    }

    #[test]
    fn exit_codes() {
        let io = CliError::Io(
            "x".into(),
            std::io::Error::from(std::io::ErrorKind::NotFound),
        );
        assert_eq!(io.exit_code(), 2);
        assert_eq!(CliError::Format("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::from(NfftError::BadGeometry("x".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::from(NfftError::TooLarge { terms: 2, limit: 1 }).exit_code(),
            3
        );
        assert_eq!(
            CliError::from(NfftError::ShapeMismatch {
                expected: 2,
                found: 1
            })
            .exit_code(),
            2
        );
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
