//! Reference reconstructors: zero-filled RSS, CG-SENSE, an unrolled
//! gradient-descent cascade with fixed TV shrinkage, and ADMM with a TV
//! prior. Every method treats frames independently and returns a magnitude
//! image.

mod cg;
mod solvers;
pub mod tv;

use std::str::FromStr;

use ndarray::{Array3, Array4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cg::{conjugate_gradient, CgOutcome};
pub use solvers::{
    data_consistency_error, recon_admm_tv, recon_cg_sense, recon_unrolled_gd,
    recon_zero_fill_rss, spectral_norm_sq,
};

use crate::error::{Error, Result};
use crate::operators::estimate_csm_masked;
use crate::sampling::SamplingMask;
use crate::tensor_io::RealArray;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Zf,
    Cgsense,
    UnrolledGd,
    AdmmTv,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Zf, Method::Cgsense, Method::UnrolledGd, Method::AdmmTv];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Zf => "zf",
            Method::Cgsense => "cgsense",
            Method::UnrolledGd => "unrolled_gd",
            Method::AdmmTv => "admm_tv",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Relative residual stopping threshold.
    pub tolerance: f64,
    pub tikhonov_lambda: f64,
    pub step_size: f64,
    pub cascades: usize,
    pub rho: f64,
    pub tv_weight: f64,
    /// Inner iterations for both the ADMM x-update CG and the TV prox.
    pub tv_inner_iters: usize,
    /// Calibration width for coil-map estimation; `None` uses the mask's own.
    pub acs_lines: Option<usize>,
}

impl ReconConfig {
    pub fn for_method(method: Method) -> Self {
        let base = Self {
            method,
            max_iters: 50,
            tolerance: 1e-6,
            tikhonov_lambda: 0.0,
            step_size: 1.0,
            cascades: 8,
            rho: 0.1,
            tv_weight: 1e-3,
            tv_inner_iters: 5,
            acs_lines: None,
        };
        match method {
            Method::AdmmTv => Self {
                max_iters: 10,
                ..base
            },
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be > 0".into()));
        }
        if !(self.rho > 0.0) {
            return Err(Error::InvalidParameter("rho must be > 0".into()));
        }
        if self.tikhonov_lambda < 0.0 || self.tv_weight < 0.0 || !(self.step_size > 0.0) {
            return Err(Error::InvalidParameter(
                "lambda and tv_weight must be >= 0, step_size > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ReconResult {
    pub method: Method,
    /// Magnitude image `frames x ky x kx`.
    pub image: Array3<f64>,
    pub complex_image: Array3<Complex64>,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    /// Squared operator norm used to scale the unrolled cascade.
    pub operator_norm_sq: Option<f64>,
    pub wall_time_volume: f64,
    pub wall_time_frame: f64,
}

impl ReconResult {
    pub fn to_real_array(&self) -> RealArray {
        RealArray::from_f64(&self.image)
    }
}

/// Dispatch on `cfg.method`. Without explicit coil maps the iterative
/// methods estimate them from the calibration lines of the mask.
pub fn reconstruct(
    y: &Array4<Complex64>,
    mask: &SamplingMask,
    csm: Option<&Array3<Complex64>>,
    cfg: &ReconConfig,
) -> Result<ReconResult> {
    cfg.validate()?;
    if cfg.method == Method::Zf {
        return recon_zero_fill_rss(y, mask);
    }
    let estimated;
    let maps = match csm {
        Some(m) => m,
        None => {
            estimated = estimate_csm_masked(y, &mask.to_grid(), cfg.acs_lines.unwrap_or(mask.acs_lines))?.maps;
            &estimated
        }
    };
    match cfg.method {
        Method::Zf => unreachable!(),
        Method::Cgsense => recon_cg_sense(y, mask, maps, cfg),
        Method::UnrolledGd => recon_unrolled_gd(y, mask, maps, cfg),
        Method::AdmmTv => recon_admm_tv(y, mask, maps, cfg),
    }
}
