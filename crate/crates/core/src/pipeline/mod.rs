//! File-based orchestration behind the `kspace-bench` command line.

mod cli;
mod commands;
mod layout;
mod manifest;

pub use cli::{
    BenchArgs, Cli, Command, EvalArgs, MaskArgs, Matrix, PhantomArgs, Preset, RankArgs, ReconArgs,
    SolverArgs, UndersampleArgs,
};
pub use commands::{
    cmd_bench, cmd_eval, cmd_mask, cmd_phantom, cmd_rank, cmd_recon, cmd_undersample,
    find_acquisitions, read_mask, FEEDBACK_FILE, METRICS_FILE, SUMMARY_FILE,
};
pub use layout::{
    case_id, find_case_dirs, find_cells, split_counts, CaseDir, Cell, CSM, FULL_KSPACE, KSPACE, MASK,
    MASK_SIDECAR, RECON, REF_IMAGE, SPLITS, SPLIT_WEIGHTS,
};
pub use manifest::{sha256_file, RunManifest, MANIFEST_FILE};

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "KSPACE_BENCH_THREADS";

/// Cap the global worker pool from `KSPACE_BENCH_THREADS`, if set.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
    // a pool built earlier in the process wins; that is fine for repeated calls
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Phantom(a) => cmd_phantom(&a).map(drop),
        Command::Mask(a) => cmd_mask(&a).map(drop),
        Command::Undersample(a) => cmd_undersample(&a).map(drop),
        Command::Recon(a) => cmd_recon(&a).map(drop),
        Command::Eval(a) => {
            let records = cmd_eval(&a)?;
            print!("{}", crate::evaluation::feedback_report(&records));
            Ok(())
        }
        Command::Rank(a) => {
            let entries = cmd_rank(&a)?;
            print!("{}", crate::ranking::leaderboard_csv(&entries)?);
            Ok(())
        }
        Command::Bench(a) => {
            let records = cmd_bench(&a)?;
            print!("{}", crate::bench::summary_csv(&crate::bench::summarize(&records))?);
            Ok(())
        }
    }
}

/// Parse `args` (program name first) and run.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    run(cli)
}
