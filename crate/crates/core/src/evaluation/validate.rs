use std::path::Path;

use ndarray::Array3;

use super::metrics::{compute_nmse, compute_psnr, compute_ssim};
use crate::error::{Error, Result};
use crate::phantom::Modality;
use crate::sampling::Pattern;
use crate::tensor_io::{read_cxa, CaseMetrics, CxaArray, FailureReason};

#[derive(Debug, Clone)]
pub enum CaseCheck {
    Valid {
        pred: Array3<f64>,
        reference: Array3<f64>,
    },
    Invalid(FailureReason),
}

fn as_magnitude(array: CxaArray) -> Option<Array3<f64>> {
    match array {
        CxaArray::Real(a) => a.to_array3().ok(),
        CxaArray::Complex(a) => a.to_array3().ok().map(|c| c.mapv(|v| v.norm())),
        CxaArray::Mask(_) => None,
    }
}

/// Classify a submitted prediction against its reference.
///
/// An unreadable reference is a harness error. A prediction that is absent
/// or cannot be decoded is `missing_file`; wrong shape or dtype is
/// `dimension_mismatch`; any NaN/Inf is `non_finite`.
pub fn validate_case(pred_path: impl AsRef<Path>, ref_path: impl AsRef<Path>) -> Result<CaseCheck> {
    let reference = read_cxa(ref_path.as_ref())?;
    if reference.non_finite.is_some() {
        return Err(Error::Invariant(format!(
            "reference {} contains non-finite samples",
            ref_path.as_ref().display()
        )));
    }
    let ref_dims = reference.array.dims().to_vec();
    let reference = as_magnitude(reference.array).ok_or_else(|| {
        Error::ExtentMismatch(format!(
            "reference {} is not a 3-D image",
            ref_path.as_ref().display()
        ))
    })?;

    let pred = match read_cxa(pred_path.as_ref()) {
        Ok(p) => p,
        Err(_) => return Ok(CaseCheck::Invalid(FailureReason::MissingFile)),
    };
    if pred.array.dims() != ref_dims.as_slice() {
        return Ok(CaseCheck::Invalid(FailureReason::DimensionMismatch));
    }
    if pred.non_finite.is_some() {
        return Ok(CaseCheck::Invalid(FailureReason::NonFinite));
    }
    match as_magnitude(pred.array) {
        Some(pred) => Ok(CaseCheck::Valid { pred, reference }),
        None => Ok(CaseCheck::Invalid(FailureReason::DimensionMismatch)),
    }
}

/// Identifies one evaluated cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseKey {
    pub team: String,
    pub case_id: String,
    pub modality: Modality,
    pub pattern: Pattern,
    pub af: u32,
}

pub fn metrics_for(key: &CaseKey, pred: &Array3<f64>, reference: &Array3<f64>) -> Result<CaseMetrics> {
    Ok(CaseMetrics {
        team: key.team.clone(),
        case_id: key.case_id.clone(),
        modality: key.modality,
        pattern: key.pattern,
        af: key.af,
        ssim: Some(compute_ssim(pred, reference)?),
        psnr_db: Some(compute_psnr(pred, reference)?),
        nmse: Some(compute_nmse(pred, reference)?),
        valid: true,
        failure_reason: None,
    })
}

/// Validate and score one case; team failures come back as invalid records.
pub fn evaluate_case(
    key: &CaseKey,
    pred_path: impl AsRef<Path>,
    ref_path: impl AsRef<Path>,
) -> Result<CaseMetrics> {
    match validate_case(pred_path, ref_path)? {
        CaseCheck::Valid { pred, reference } => metrics_for(key, &pred, &reference),
        CaseCheck::Invalid(reason) => Ok(CaseMetrics::failed(
            &key.team,
            &key.case_id,
            key.modality,
            key.pattern,
            key.af,
            reason,
        )),
    }
}
