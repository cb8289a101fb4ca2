//! Validity checks, image-quality metrics, success-rate weighting and
//! feedback reports.

mod aggregate;
mod metrics;
mod report;
mod validate;

pub use aggregate::{
    aggregate_cells, aggregate_modality, aggregate_overall, weight_cell, ModalityAggregate,
    TeamSummary,
};
pub use metrics::{
    compute_nmse, compute_psnr, compute_ssim, data_range, ssim_2d, METRIC_CONVENTIONS,
    PSNR_CAP_DB, SSIM_K1, SSIM_K2, SSIM_WINDOW,
};
pub use report::feedback_report;
pub use validate::{evaluate_case, metrics_for, validate_case, CaseCheck, CaseKey};
