use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::cli::*;
use super::layout::*;
use super::manifest::RunManifest;
use crate::bench::{bench_recon, records_csv, summarize, summary_csv, BenchCase, BenchRecord};
use crate::error::{Error, Result};
use crate::evaluation::{aggregate_cells, aggregate_overall, evaluate_case, feedback_report, CaseKey};
use crate::phantom::{generate_phantom, phantom_to_kspace, PhantomSpec};
use crate::ranking::{
    aggregate_final_rank, attach_p_values, icc_3k, median_aggregate, reader_diff, reader_zscore,
    write_leaderboard, LeaderboardEntry, PairedSamples, ReaderScoreTable, TeamScores,
};
use crate::recon::reconstruct;
use crate::sampling::{apply_mask, MaskSidecar, MaskSpec, SamplingMask};
use crate::tensor_io::{
    read_cxa, read_metrics_jsonl, write_cxa, write_metrics_jsonl, CaseMetrics, ComplexArray, RealArray,
};
use crate::util::mix_seed;

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn params<T: serde::Serialize>(args: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(args)?)
}

/// Seed stream for one named artifact, stable across runs and platforms.
fn keyed_seed(seed: u64, key: &str) -> u64 {
    let d = Sha256::digest(key.as_bytes());
    mix_seed(seed, u64::from_le_bytes(d[..8].try_into().expect("8 bytes")))
}

fn write_mask(mask: &SamplingMask, dir: &Path) -> Result<[PathBuf; 2]> {
    let cxa = dir.join(MASK);
    let sidecar = dir.join(MASK_SIDECAR);
    write_cxa(&mask.to_mask_array().into(), &cxa)?;
    write_text(&sidecar, &(serde_json::to_string_pretty(&mask.sidecar())? + "\n"))?;
    Ok([cxa, sidecar])
}

pub fn read_mask(dir: &Path) -> Result<SamplingMask> {
    let arr = read_cxa(dir.join(MASK))?.array.into_mask()?;
    let path = dir.join(MASK_SIDECAR);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let sidecar: MaskSidecar = serde_json::from_str(&text)?;
    SamplingMask::from_parts(&arr, &sidecar)
}

pub fn cmd_phantom(args: &PhantomArgs) -> Result<RunManifest> {
    if args.modalities.is_empty() {
        return Err(Error::InvalidParameter("at least one modality is required".into()));
    }
    let counts = split_counts(args.cases);
    let mut jobs = Vec::new();
    let mut index = 0;
    for (split, n) in SPLITS.iter().zip(counts) {
        for _ in 0..n {
            for &modality in &args.modalities {
                jobs.push((
                    CaseDir {
                        split: split.to_string(),
                        case_id: case_id(index),
                        modality,
                    },
                    mix_seed(args.seed, index as u64),
                ));
            }
            index += 1;
        }
    }
    let outputs: Vec<Vec<PathBuf>> = jobs
        .par_iter()
        .map(|(cd, seed)| -> Result<Vec<PathBuf>> {
            let spec = PhantomSpec {
                ky: args.matrix.ky,
                kx: args.matrix.kx,
                frames: args.frames,
                coils: args.coils,
                modality: cd.modality,
                seed: *seed,
                contraction_amplitude: args.contraction,
            };
            let ph = generate_phantom(&spec)?;
            let k = phantom_to_kspace(&ph.image, &ph.coils)?;
            let dir = args.out.join(cd.rel());
            create_dir(&dir)?;
            let files = [dir.join(REF_IMAGE), dir.join(FULL_KSPACE), dir.join(CSM)];
            write_cxa(&RealArray::from_f64(&ph.image).into(), &files[0])?;
            write_cxa(&ComplexArray::from_c64(&k).into(), &files[1])?;
            write_cxa(&ComplexArray::from_c64(&ph.coils).into(), &files[2])?;
            Ok(files.to_vec())
        })
        .collect::<Result<_>>()?;
    let mut m = RunManifest::new("phantom", params(args)?, vec![args.seed]);
    m.add_outputs(&args.out, &outputs.concat())?;
    m.details = json!({ "split_counts": { "train": counts[0], "val": counts[1], "test": counts[2] } });
    m.write(&args.out)?;
    Ok(m)
}

pub fn cmd_mask(args: &MaskArgs) -> Result<RunManifest> {
    let cell = Cell {
        pattern: args.pattern,
        af: args.af,
    };
    if let Some(p) = args.preset {
        p.check(cell)?;
    }
    let mask = MaskSpec::new(args.pattern, args.af, args.frames, args.matrix.ky, args.matrix.kx)
        .with_acs(args.acs_lines)
        .with_seed(args.seed)
        .generate()?;
    create_dir(&args.out)?;
    let files = write_mask(&mask, &args.out)?;
    let mut m = RunManifest::new("mask", params(args)?, vec![args.seed]);
    m.add_outputs(&args.out, &files)?;
    m.details = json!({ "af_realized": mask.af_realized });
    m.write(&args.out)?;
    Ok(m)
}

pub fn cmd_undersample(args: &UndersampleArgs) -> Result<RunManifest> {
    let cells: Vec<Cell> = args
        .patterns
        .iter()
        .flat_map(|&pattern| args.af.iter().map(move |&af| Cell { pattern, af }))
        .collect();
    if cells.is_empty() {
        return Err(Error::InvalidParameter("no pattern/af cells requested".into()));
    }
    if let Some(p) = args.preset {
        cells.iter().try_for_each(|c| p.check(*c))?;
    }
    let cases = find_case_dirs(&args.data, Some(FULL_KSPACE))?;
    if cases.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no {FULL_KSPACE} found under {}",
            args.data.display()
        )));
    }
    let results: Vec<(Vec<PathBuf>, PathBuf, u64)> = cases
        .par_iter()
        .map(|cd| -> Result<Vec<(Vec<PathBuf>, PathBuf, u64)>> {
            let src = args.data.join(cd.rel()).join(FULL_KSPACE);
            let full = read_cxa(&src)?.array.into_complex()?.to_array4()?;
            let (_, frames, ky, kx) = full.dim();
            cells
                .iter()
                .map(|&cell| {
                    let seed = keyed_seed(args.seed, &cd.key(cell));
                    let mask = MaskSpec::new(cell.pattern, cell.af, frames, ky, kx)
                        .with_acs(args.acs_lines)
                        .with_seed(seed)
                        .generate()
                        .map_err(|e| e.in_case(cd.key(cell)))?;
                    let y = apply_mask(&full, &mask)?;
                    let dir = args.out.join(cd.rel()).join(cell.to_string());
                    create_dir(&dir)?;
                    let k = dir.join(KSPACE);
                    write_cxa(&ComplexArray::from_c64(&y).into(), &k)?;
                    let [a, b] = write_mask(&mask, &dir)?;
                    Ok((vec![k, a, b], src.clone(), seed))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    let mut m = RunManifest::new(
        "undersample",
        params(args)?,
        std::iter::once(args.seed).chain(results.iter().map(|r| r.2)).collect(),
    );
    let inputs: BTreeSet<&PathBuf> = results.iter().map(|r| &r.1).collect();
    m.add_inputs(&args.data, &inputs.into_iter().collect::<Vec<_>>())?;
    m.add_outputs(&args.out, &results.iter().flat_map(|r| r.0.clone()).collect::<Vec<_>>())?;
    m.write(&args.out)?;
    Ok(m)
}

/// Every (case, cell) directory holding an undersampled acquisition.
pub fn find_acquisitions(root: &Path) -> Result<Vec<(CaseDir, Cell)>> {
    let mut out = Vec::new();
    for cd in find_case_dirs(root, None)? {
        for cell in find_cells(&root.join(cd.rel()))? {
            if root.join(cd.rel()).join(cell.to_string()).join(KSPACE).is_file() {
                out.push((cd.clone(), cell));
            }
        }
    }
    Ok(out)
}

pub fn cmd_recon(args: &ReconArgs) -> Result<RunManifest> {
    let cfg = args.solver.config(args.method);
    cfg.validate()?;
    let jobs = find_acquisitions(&args.data)?;
    if jobs.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no undersampled cells found under {}",
            args.data.display()
        )));
    }
    let logs: Vec<(PathBuf, serde_json::Value)> = jobs
        .par_iter()
        .map(|(cd, cell)| -> Result<(PathBuf, serde_json::Value)> {
            let key = cd.key(*cell);
            let run = || -> Result<(PathBuf, serde_json::Value)> {
                let src = args.data.join(cd.rel()).join(cell.to_string());
                let y = read_cxa(src.join(KSPACE))?.array.into_complex()?.to_array4()?;
                let mask = read_mask(&src)?;
                let csm = match &args.csm_from {
                    Some(root) => Some(read_cxa(root.join(cd.rel()).join(CSM))?.array.into_complex()?.to_array3()?),
                    None => None,
                };
                let r = reconstruct(&y, &mask, csm.as_ref(), &cfg)?;
                let dir = args.out.join(cd.rel()).join(cell.to_string());
                create_dir(&dir)?;
                let out = dir.join(RECON);
                write_cxa(&r.to_real_array().into(), &out)?;
                let log = json!({
                    "key": key,
                    "iterations_used": r.iterations_used,
                    "final_residual": r.final_residual,
                    "converged": r.converged,
                    "residual_history": r.residual_history,
                    "wall_time_volume": r.wall_time_volume,
                    "wall_time_frame": r.wall_time_frame,
                });
                Ok((out, log))
            };
            run().map_err(|e| e.in_case(&key))
        })
        .collect::<Result<_>>()?;
    let mut m = RunManifest::new("recon", json!({ "args": params(args)?, "config": cfg }), vec![]);
    let inputs: Vec<PathBuf> = jobs
        .iter()
        .flat_map(|(cd, cell)| {
            let d = args.data.join(cd.rel()).join(cell.to_string());
            [d.join(KSPACE), d.join(MASK), d.join(MASK_SIDECAR)]
        })
        .collect();
    m.add_inputs(&args.data, &inputs)?;
    m.add_outputs(&args.out, &logs.iter().map(|l| l.0.clone()).collect::<Vec<_>>())?;
    m.details = json!({ "runs": logs.into_iter().map(|l| l.1).collect::<Vec<_>>() });
    m.write(&args.out)?;
    Ok(m)
}

pub const METRICS_FILE: &str = "metrics.jsonl";
pub const FEEDBACK_FILE: &str = "feedback.txt";
pub const SUMMARY_FILE: &str = "summary.json";

/// Team failures (missing, misshapen or non-finite predictions) become
/// records; only problems with the references are errors.
pub fn cmd_eval(args: &EvalArgs) -> Result<Vec<CaseMetrics>> {
    let mut refs = find_case_dirs(&args.reference, Some(REF_IMAGE))?;
    if let Some(split) = &args.split {
        refs.retain(|cd| &cd.split == split);
    }
    if refs.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no {REF_IMAGE} found under {}",
            args.reference.display()
        )));
    }
    let cells: Vec<Cell> = if args.cells.is_empty() {
        let mut found = BTreeSet::new();
        for cd in &refs {
            found.extend(find_cells(&args.pred.join(cd.rel()))?);
        }
        found.into_iter().collect()
    } else {
        args.cells.clone()
    };
    if cells.is_empty() {
        return Err(Error::InvalidParameter(
            "no cells given and none found in the prediction tree".into(),
        ));
    }
    let jobs: Vec<(&CaseDir, Cell)> = refs
        .iter()
        .flat_map(|cd| cells.iter().map(move |c| (cd, *c)))
        .collect();
    let records: Vec<CaseMetrics> = jobs
        .par_iter()
        .map(|(cd, cell)| {
            let key = CaseKey {
                team: args.team.clone(),
                case_id: format!("{}/{}", cd.split, cd.case_id),
                modality: cd.modality,
                pattern: cell.pattern,
                af: cell.af,
            };
            let pred = args.pred.join(cd.rel()).join(cell.to_string()).join(RECON);
            let reference = args.reference.join(cd.rel()).join(REF_IMAGE);
            evaluate_case(&key, &pred, &reference).map_err(|e| e.in_case(cd.key(*cell)))
        })
        .collect::<Result<_>>()?;
    create_dir(&args.out)?;
    let metrics = args.out.join(METRICS_FILE);
    let feedback = args.out.join(FEEDBACK_FILE);
    let summary = args.out.join(SUMMARY_FILE);
    write_metrics_jsonl(&records, &metrics)?;
    write_text(&feedback, &feedback_report(&records))?;
    let agg = aggregate_cells(&records)?;
    let overall = aggregate_overall(&agg)?;
    write_text(
        &summary,
        &(serde_json::to_string_pretty(&json!({ "cells": agg, "overall": overall }))? + "\n"),
    )?;
    let mut m = RunManifest::new("eval", params(args)?, vec![]);
    let refs_files: Vec<PathBuf> = refs.iter().map(|cd| args.reference.join(cd.rel()).join(REF_IMAGE)).collect();
    m.add_inputs(&args.reference, &refs_files)?;
    m.add_outputs(&args.out, &[metrics, feedback, summary])?;
    m.write(&args.out)?;
    Ok(records)
}

fn reader_scores(path: &Path) -> Result<(BTreeMap<String, f64>, serde_json::Value, PairedSamples)> {
    let table = ReaderScoreTable::from_csv_path(path)?;
    let z = reader_zscore(reader_diff(&table)?)?;
    let per_modality = median_aggregate(&z)?;
    let mut by_team: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((team, _), v) in &per_modality {
        by_team.entry(team.clone()).or_default().push(*v);
    }
    let means = by_team
        .into_iter()
        .map(|(t, v)| (t, v.iter().sum::<f64>() / v.len() as f64))
        .collect();

    let mut samples = PairedSamples::new();
    for r in &z {
        let key = format!("{}/{}/{}/{}_af{}", r.reader_id, r.case_id, r.modality, r.pattern, r.af);
        samples.entry(r.team.clone()).or_default().insert(key, r.z.expect("z filled"));
    }

    // raw-score ICC over items rated by every reader
    let readers: BTreeSet<&str> = table.rows().iter().map(|r| r.reader_id.as_str()).collect();
    let mut items: BTreeMap<String, BTreeMap<&str, f64>> = BTreeMap::new();
    for r in table.rows() {
        let item = format!("{}/{}/{}/{}_af{}", r.entity, r.case_id, r.modality, r.pattern, r.af);
        items.entry(item).or_default().insert(&r.reader_id, r.score as f64);
    }
    let matrix: Vec<Vec<f64>> = items
        .values()
        .filter(|m| m.len() == readers.len())
        .map(|m| m.values().copied().collect())
        .collect();
    let icc = icc_3k(&matrix).ok();
    let details = json!({
        "readers": readers.len(),
        "median_z": per_modality.iter().map(|((t, m), v)| json!({"team": t, "modality": m, "median_z": v})).collect::<Vec<_>>(),
        "icc_3k": icc,
    });
    Ok((means, details, samples))
}

pub fn cmd_rank(args: &RankArgs) -> Result<Vec<LeaderboardEntry>> {
    let mut records = Vec::new();
    for path in &args.metrics {
        records.extend(read_metrics_jsonl(path)?);
    }
    let mut teams: BTreeMap<String, Vec<CaseMetrics>> = BTreeMap::new();
    for r in records {
        teams.entry(r.team.clone()).or_default().push(r);
    }
    if teams.is_empty() {
        return Err(Error::InvalidParameter("metrics files hold no records".into()));
    }
    let (reader_means, reader_details, reader_samples) = match &args.readers {
        Some(p) => {
            let (m, d, s) = reader_scores(p)?;
            (m, Some(d), Some(s))
        }
        None => (BTreeMap::new(), None, None),
    };
    let mut scores = Vec::new();
    let mut metric_samples: BTreeMap<String, PairedSamples> = BTreeMap::new();
    for (team, recs) in &teams {
        let overall = aggregate_overall(&aggregate_cells(recs)?)?;
        scores.push(TeamScores {
            team: team.clone(),
            ssim_adj_overall: overall.ssim_adj,
            reader_score_mean: reader_means.get(team).copied(),
        });
        for r in recs.iter().filter(|r| r.valid) {
            let key = format!("{}/{}/{}_af{}", r.case_id, r.modality, r.pattern, r.af);
            for (name, v) in [("ssim", r.ssim), ("psnr", r.psnr_db), ("nmse", r.nmse)] {
                if let Some(v) = v {
                    metric_samples
                        .entry(name.to_string())
                        .or_default()
                        .entry(team.clone())
                        .or_default()
                        .insert(key.clone(), v);
                }
            }
        }
    }
    if let Some(s) = reader_samples {
        metric_samples.insert("reader".into(), s);
    }
    let mut entries = aggregate_final_rank(&scores);
    attach_p_values(&mut entries, &metric_samples)?;
    create_dir(&args.out)?;
    write_leaderboard(&entries, &args.out)?;
    let mut m = RunManifest::new("rank", params(args)?, vec![]);
    let mut inputs = args.metrics.clone();
    inputs.extend(args.readers.clone());
    for i in &inputs {
        let root = i.parent().unwrap_or(Path::new(""));
        m.add_inputs(root, &[i])?;
    }
    m.add_outputs(&args.out, &[args.out.join("leaderboard.csv"), args.out.join("leaderboard.json")])?;
    if let Some(d) = reader_details {
        m.details = json!({ "readers": d });
    }
    m.write(&args.out)?;
    Ok(entries)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<BenchRecord>> {
    let mut cases: Vec<BenchCase> = find_acquisitions(&args.data)?
        .into_iter()
        .map(|(cd, cell)| BenchCase {
            case_id: cd.key(cell),
            dir: args.data.join(cd.rel()).join(cell.to_string()),
        })
        .collect();
    if let Some(n) = args.limit {
        cases.truncate(n);
    }
    let scratch = args.out.join("scratch");
    let mut records = Vec::new();
    for &method in &args.methods {
        let cfg = args.solver.config(method);
        records.extend(bench_recon(&cases, &cfg, args.repeats, args.parallel, &scratch)?);
    }
    std::fs::remove_dir_all(&scratch).map_err(|e| Error::io(&scratch, e))?;
    let rec_path = args.out.join("bench_records.csv");
    let sum_path = args.out.join("bench_summary.csv");
    write_text(&rec_path, &records_csv(&records)?)?;
    write_text(&sum_path, &summary_csv(&summarize(&records))?)?;
    let mut m = RunManifest::new("bench", params(args)?, vec![]);
    m.add_outputs(&args.out, &[rec_path, sum_path])?;
    m.write(&args.out)?;
    Ok(records)
}
