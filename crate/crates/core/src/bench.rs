//! Wall-clock benchmarking of the reconstruction methods, file I/O included.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recon::{reconstruct, Method, ReconConfig};
use crate::sampling::{apply_mask, MaskSidecar, SamplingMask};
use crate::tensor_io::{read_cxa, write_cxa};
use crate::util::median;

/// An undersampled case on disk: a directory holding `kspace.cxa`,
/// `mask.cxa` and `mask.json`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchCase {
    pub case_id: String,
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub case_id: String,
    /// `serial` or `parallel`.
    pub mode: String,
    pub repeats: usize,
    pub frames: usize,
    /// Total wall seconds over all timed repeats.
    pub runtime: f64,
    /// Median seconds per volume.
    pub t_vol: f64,
    /// Seconds per frame.
    pub t_frame: f64,
    /// Frames per second.
    pub throughput: f64,
    pub peak_resident_memory: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub method: Method,
    pub mode: String,
    pub cases: usize,
    pub runtime: f64,
    pub t_vol: f64,
    pub t_frame: f64,
    pub throughput: f64,
}

/// Peak resident set size of this process (`VmHWM`), when the platform
/// exposes it.
pub fn peak_resident_memory() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Read, reconstruct and write one case; returns the frame count.
pub fn run_case_once(case: &BenchCase, cfg: &ReconConfig, out: &Path) -> Result<usize> {
    let y = read_cxa(case.dir.join("kspace.cxa"))?.array.into_complex()?.to_array4()?;
    let mask_arr = read_cxa(case.dir.join("mask.cxa"))?.array.into_mask()?;
    let sidecar_path = case.dir.join("mask.json");
    let sidecar: MaskSidecar = serde_json::from_str(
        &std::fs::read_to_string(&sidecar_path).map_err(|e| Error::io(&sidecar_path, e))?,
    )?;
    let mask = SamplingMask::from_parts(&mask_arr, &sidecar)?;
    let y = apply_mask(&y, &mask)?;
    let result = reconstruct(&y, &mask, None, cfg)?;
    write_cxa(&result.to_real_array().into(), out)?;
    Ok(result.image.dim().0)
}

fn time_case(case: &BenchCase, cfg: &ReconConfig, repeats: usize, mode: &str, scratch: &Path) -> Result<BenchRecord> {
    let out = scratch.join(format!("{}_{}.cxa", cfg.method, case.case_id.replace('/', "_")));
    let wrap = |e: Error| e.in_case(&case.case_id);
    // warm-up, discarded
    let frames = run_case_once(case, cfg, &out).map_err(wrap)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t0 = Instant::now();
        run_case_once(case, cfg, &out).map_err(wrap)?;
        times.push(t0.elapsed().as_secs_f64());
    }
    let runtime = times.iter().sum();
    let t_vol = median(&mut times).expect("repeats >= 1");
    Ok(BenchRecord {
        method: cfg.method,
        case_id: case.case_id.clone(),
        mode: mode.to_string(),
        repeats,
        frames,
        runtime,
        t_vol,
        t_frame: t_vol / frames as f64,
        throughput: frames as f64 / t_vol,
        peak_resident_memory: peak_resident_memory(),
    })
}

/// Time `cfg.method` on every case: one discarded warm-up run, then the
/// median of `repeats` timed runs. Cases run serially unless `parallel`.
pub fn bench_recon(
    cases: &[BenchCase],
    cfg: &ReconConfig,
    repeats: usize,
    parallel: bool,
    scratch: &Path,
) -> Result<Vec<BenchRecord>> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be >= 1".into()));
    }
    if cases.is_empty() {
        return Err(Error::InvalidParameter("no cases to benchmark".into()));
    }
    cfg.validate()?;
    std::fs::create_dir_all(scratch).map_err(|e| Error::io(scratch, e))?;
    if parallel {
        cases
            .par_iter()
            .map(|c| time_case(c, cfg, repeats, "parallel", scratch))
            .collect()
    } else {
        cases
            .iter()
            .map(|c| time_case(c, cfg, repeats, "serial", scratch))
            .collect()
    }
}

/// Per-(method, mode) medians over cases; runtime is summed.
pub fn summarize(records: &[BenchRecord]) -> Vec<BenchSummary> {
    let mut keys: Vec<(Method, String)> = records.iter().map(|r| (r.method, r.mode.clone())).collect();
    keys.sort_by(|a, b| a.0.as_str().cmp(b.0.as_str()).then(a.1.cmp(&b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(method, mode)| {
            let group: Vec<&BenchRecord> =
                records.iter().filter(|r| r.method == method && r.mode == mode).collect();
            let med = |f: fn(&BenchRecord) -> f64| {
                let mut v: Vec<f64> = group.iter().map(|r| f(r)).collect();
                median(&mut v).expect("non-empty group")
            };
            BenchSummary {
                method,
                mode,
                cases: group.len(),
                runtime: group.iter().map(|r| r.runtime).sum(),
                t_vol: med(|r| r.t_vol),
                t_frame: med(|r| r.t_frame),
                throughput: med(|r| r.throughput),
            }
        })
        .collect()
}

pub fn records_csv(records: &[BenchRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method", "case_id", "mode", "repeats", "frames", "runtime", "t_vol", "t_frame",
        "throughput", "peak_resident_memory",
    ])?;
    for r in records {
        w.write_record([
            r.method.to_string(),
            r.case_id.clone(),
            r.mode.clone(),
            r.repeats.to_string(),
            r.frames.to_string(),
            format!("{:.6}", r.runtime),
            format!("{:.6}", r.t_vol),
            format!("{:.6}", r.t_frame),
            format!("{:.6}", r.throughput),
            r.peak_resident_memory.map_or(String::new(), |m| m.to_string()),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn summary_csv(summary: &[BenchSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "mode", "cases", "runtime", "t_vol", "t_frame", "throughput"])?;
    for s in summary {
        w.write_record([
            s.method.to_string(),
            s.mode.clone(),
            s.cases.to_string(),
            format!("{:.6}", s.runtime),
            format!("{:.6}", s.t_vol),
            format!("{:.6}", s.t_frame),
            format!("{:.6}", s.throughput),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
