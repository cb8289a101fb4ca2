//! Per-case metric records and their JSON-lines encoding.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::Modality;
use crate::sampling::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    MissingFile,
    DimensionMismatch,
    NonFinite,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::MissingFile => "missing_file",
            FailureReason::DimensionMismatch => "dimension_mismatch",
            FailureReason::NonFinite => "non_finite",
        }
    }
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated (team, case, modality, pattern, af) cell. Invalid records
/// carry a failure reason and no metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseMetrics {
    pub team: String,
    pub case_id: String,
    pub modality: Modality,
    pub pattern: Pattern,
    pub af: u32,
    pub ssim: Option<f64>,
    pub psnr_db: Option<f64>,
    pub nmse: Option<f64>,
    pub valid: bool,
    pub failure_reason: Option<FailureReason>,
}

impl CaseMetrics {
    pub fn failed(
        team: &str,
        case_id: &str,
        modality: Modality,
        pattern: Pattern,
        af: u32,
        reason: FailureReason,
    ) -> Self {
        Self {
            team: team.to_owned(),
            case_id: case_id.to_owned(),
            modality,
            pattern,
            af,
            ssim: None,
            psnr_db: None,
            nmse: None,
            valid: false,
            failure_reason: Some(reason),
        }
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        let has_metrics = self.ssim.is_some() && self.psnr_db.is_some() && self.nmse.is_some();
        let no_metrics = self.ssim.is_none() && self.psnr_db.is_none() && self.nmse.is_none();
        match (self.valid, self.failure_reason) {
            (true, None) if has_metrics => Ok(()),
            (true, None) => Err("valid record is missing metrics".into()),
            (true, Some(_)) => Err("valid record carries a failure_reason".into()),
            (false, Some(_)) if no_metrics => Ok(()),
            (false, Some(_)) => Err("invalid record carries metrics".into()),
            (false, None) => Err("invalid record lacks failure_reason".into()),
        }
    }
}

pub fn write_metrics_jsonl(records: &[CaseMetrics], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        r.check().map_err(Error::Invariant)?;
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn parse_metrics_jsonl(text: &str) -> Result<Vec<CaseMetrics>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CaseMetrics = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        rec.check()
            .map_err(|message| Error::MalformedRecord { line: i + 1, message })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_metrics_jsonl(path: impl AsRef<Path>) -> Result<Vec<CaseMetrics>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_metrics_jsonl(&text)
}
