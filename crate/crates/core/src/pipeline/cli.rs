use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::layout::Cell;
use crate::error::{Error, Result};
use crate::phantom::Modality;
use crate::recon::{Method, ReconConfig};
use crate::sampling::{Pattern, DEFAULT_ACS_LINES};

#[derive(Debug, Parser)]
#[command(name = "kspace-bench", version, about = "Synthetic multi-coil cardiac MRI reconstruction benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a phantom dataset tree.
    Phantom(PhantomArgs),
    /// Write a single sampling mask.
    Mask(MaskArgs),
    /// Undersample every case of a dataset for a set of cells.
    Undersample(UndersampleArgs),
    /// Reconstruct every undersampled cell.
    Recon(ReconArgs),
    /// Score a prediction tree against the references.
    Eval(EvalArgs),
    /// Build the leaderboard from metrics files and optional reader scores.
    Rank(RankArgs),
    /// Time reconstruction methods on undersampled cases.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Matrix {
    pub ky: usize,
    pub kx: usize,
}

impl FromStr for Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("matrix {s:?} is not of the form KYxKX"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Ok(Matrix {
            ky: a.parse().map_err(|_| bad())?,
            kx: b.parse().map_err(|_| bad())?,
        })
    }
}

/// Acquisition restrictions of the two challenge tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Uniform sampling at 4x, 8x or 10x only.
    Task1,
    /// Any pattern, 4x to 24x.
    Task2,
}

impl Preset {
    pub fn check(self, cell: Cell) -> Result<()> {
        let ok = match self {
            Preset::Task1 => cell.pattern == Pattern::Uniform && [4, 8, 10].contains(&cell.af),
            Preset::Task2 => (4..=24).contains(&cell.af),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "cell {cell} is not allowed by preset {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PhantomArgs {
    #[arg(long, default_value_t = 2)]
    pub cases: usize,
    #[arg(long, default_value_t = 12)]
    pub frames: usize,
    #[arg(long, default_value_t = 8)]
    pub coils: usize,
    #[arg(long, default_value = "192x156")]
    pub matrix: Matrix,
    #[arg(long, value_delimiter = ',', default_value = "cine_sax")]
    pub modalities: Vec<Modality>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub contraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MaskArgs {
    #[arg(long)]
    pub pattern: Pattern,
    #[arg(long)]
    pub af: u32,
    #[arg(long, default_value_t = 12)]
    pub frames: usize,
    #[arg(long, default_value = "192x156")]
    pub matrix: Matrix,
    #[arg(long, default_value_t = DEFAULT_ACS_LINES)]
    pub acs_lines: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UndersampleArgs {
    /// Dataset root written by `phantom`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "uniform")]
    pub patterns: Vec<Pattern>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub af: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_ACS_LINES)]
    pub acs_lines: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub cascades: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub tv_weight: Option<f64>,
    #[arg(long)]
    pub tv_inner_iters: Option<usize>,
    #[arg(long)]
    pub acs_lines: Option<usize>,
}

impl SolverArgs {
    pub fn config(&self, method: Method) -> ReconConfig {
        let mut c = ReconConfig::for_method(method);
        macro_rules! set {
            ($($f:ident => $g:ident),*) => {$( if let Some(v) = self.$f { c.$g = v; } )*};
        }
        set!(max_iters => max_iters, tolerance => tolerance, lambda => tikhonov_lambda,
             step_size => step_size, cascades => cascades, rho => rho, tv_weight => tv_weight,
             tv_inner_iters => tv_inner_iters);
        if self.acs_lines.is_some() {
            c.acs_lines = self.acs_lines;
        }
        c
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconArgs {
    /// Undersampled tree written by `undersample`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "cgsense")]
    pub method: Method,
    /// Use the true coil maps from this dataset root instead of estimating them.
    #[arg(long)]
    pub csm_from: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    /// Dataset root holding `ref_image.cxa` files.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Prediction tree holding `{cell}/recon.cxa` files.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub team: String,
    /// Expected cells such as `uniform_af4`; defaults to every cell found in the prediction tree.
    #[arg(long, value_delimiter = ',')]
    pub cells: Vec<Cell>,
    /// Restrict to one split.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub metrics: Vec<PathBuf>,
    #[arg(long)]
    pub readers: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    /// Undersampled tree written by `undersample`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "zf,cgsense")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Run cases concurrently; reported as a separate mode.
    #[arg(long)]
    pub parallel: bool,
    /// Benchmark at most this many cells.
    #[arg(long)]
    pub limit: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}
