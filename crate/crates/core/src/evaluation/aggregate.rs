//! Success-rate weighting of per-cell means and the equal-contribution
//! rollup across (modality, pattern, af) cells.
//!
//! With `w = n / N`, SSIM and PSNR are scaled by `w` and NMSE by `2 - w`, so
//! the adjusted NMSE stays within `[mean, 2 * mean]`. Means are taken over
//! successful cases only; the penalty for failures is carried by `w`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::Modality;
use crate::sampling::Pattern;
use crate::tensor_io::CaseMetrics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityAggregate {
    pub modality: Modality,
    pub pattern: Pattern,
    pub af: u32,
    pub n_success: usize,
    pub n_total: usize,
    pub w: f64,
    pub ssim_mean: Option<f64>,
    pub psnr_mean: Option<f64>,
    pub nmse_mean: Option<f64>,
    pub ssim_adj: f64,
    pub psnr_adj: f64,
    /// `None` when no case succeeded: the weighted mean is undefined.
    pub nmse_adj: Option<f64>,
}

/// Weighting applied to one cell from its success count and per-success means.
pub fn weight_cell(
    n_success: usize,
    n_total: usize,
    ssim_mean: Option<f64>,
    psnr_mean: Option<f64>,
    nmse_mean: Option<f64>,
) -> Result<(f64, f64, f64, Option<f64>)> {
    if n_total == 0 || n_success > n_total {
        return Err(Error::InvalidParameter(format!(
            "success count {n_success} of {n_total}"
        )));
    }
    let w = n_success as f64 / n_total as f64;
    let ssim_adj = ssim_mean.map_or(0.0, |m| w * m);
    let psnr_adj = psnr_mean.map_or(0.0, |m| w * m);
    let nmse_adj = nmse_mean.map(|m| (2.0 - w) * m);
    Ok((w, ssim_adj, psnr_adj, nmse_adj))
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Aggregate the records of one (modality, pattern, af) cell.
pub fn aggregate_modality(records: &[CaseMetrics]) -> Result<ModalityAggregate> {
    let first = records
        .first()
        .ok_or_else(|| Error::EmptyGroup("no records for modality aggregate".into()))?;
    if records
        .iter()
        .any(|r| (r.modality, r.pattern, r.af) != (first.modality, first.pattern, first.af))
    {
        return Err(Error::InvalidParameter(
            "records span more than one (modality, pattern, af) cell".into(),
        ));
    }
    let ok: Vec<&CaseMetrics> = records.iter().filter(|r| r.valid).collect();
    let ssim_mean = mean(ok.iter().filter_map(|r| r.ssim));
    let psnr_mean = mean(ok.iter().filter_map(|r| r.psnr_db));
    let nmse_mean = mean(ok.iter().filter_map(|r| r.nmse));
    let (w, ssim_adj, psnr_adj, nmse_adj) =
        weight_cell(ok.len(), records.len(), ssim_mean, psnr_mean, nmse_mean)?;
    Ok(ModalityAggregate {
        modality: first.modality,
        pattern: first.pattern,
        af: first.af,
        n_success: ok.len(),
        n_total: records.len(),
        w,
        ssim_mean,
        psnr_mean,
        nmse_mean,
        ssim_adj,
        psnr_adj,
        nmse_adj,
    })
}

/// Group one team's records into cells (sorted by modality, pattern, af).
pub fn aggregate_cells(records: &[CaseMetrics]) -> Result<Vec<ModalityAggregate>> {
    let mut cells: BTreeMap<(Modality, Pattern, u32), Vec<CaseMetrics>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.modality, r.pattern, r.af))
            .or_default()
            .push(r.clone());
    }
    cells.values().map(|v| aggregate_modality(v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamSummary {
    pub cells: usize,
    pub ssim_adj: f64,
    pub psnr_adj: f64,
    /// Mean over cells whose adjusted NMSE is defined.
    pub nmse_adj: Option<f64>,
    pub nmse_undefined_cells: usize,
}

/// Unweighted mean across cells: every cell counts equally regardless of
/// how many cases it holds.
pub fn aggregate_overall(cells: &[ModalityAggregate]) -> Result<TeamSummary> {
    if cells.is_empty() {
        return Err(Error::EmptyGroup("no cells to aggregate".into()));
    }
    let n = cells.len() as f64;
    let nmse_defined: Vec<f64> = cells.iter().filter_map(|c| c.nmse_adj).collect();
    Ok(TeamSummary {
        cells: cells.len(),
        ssim_adj: cells.iter().map(|c| c.ssim_adj).sum::<f64>() / n,
        psnr_adj: cells.iter().map(|c| c.psnr_adj).sum::<f64>() / n,
        nmse_adj: mean(nmse_defined.iter().copied()),
        nmse_undefined_cells: cells.len() - nmse_defined.len(),
    })
}
