//! Coil-sensitivity estimation from the fully sampled calibration lines.

use ndarray::{s, Array2, Array3, Array4, Axis};
use num_complex::Complex64;

use super::fft::Fft2c;
use crate::error::{Error, Result};
use crate::sampling::acs_range;

/// Pixels whose RSS magnitude is below this fraction of the maximum are
/// treated as outside the support and get zero sensitivity.
pub const CSM_SUPPORT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct CsmEstimate {
    pub maps: Array3<Complex64>,
    pub support: Array2<bool>,
    pub acs_lines: usize,
}

fn check_acs_from_data(y: &Array4<Complex64>, acs_lines: usize) -> Result<()> {
    let (_, frames, ky, _) = y.dim();
    let rows = acs_range(ky, acs_lines);
    for t in 0..frames {
        for k in rows.clone() {
            let line = y.slice(s![.., t, k, ..]);
            if line.iter().all(|v| v.norm_sqr() == 0.0) {
                return Err(Error::AcsNotSampled(format!("frame {t}, ky line {k} is empty")));
            }
        }
    }
    Ok(())
}

/// Estimate unit sum-of-squares coil maps from the central `acs_lines` ky
/// lines. Sampling of the calibration block is inferred from the data: an
/// all-zero calibration line is treated as unsampled. All-zero input yields
/// all-zero maps with an empty support.
pub fn estimate_csm(y: &Array4<Complex64>, acs_lines: usize) -> Result<CsmEstimate> {
    let (coils, _, ky, kx) = y.dim();
    if acs_lines < 8 {
        return Err(Error::InvalidParameter(format!(
            "acs_lines must be >= 8, got {acs_lines}"
        )));
    }
    if acs_lines > ky {
        return Err(Error::InvalidParameter(format!(
            "acs_lines {acs_lines} exceeds ky extent {ky}"
        )));
    }
    if y.iter().all(|v| v.norm_sqr() == 0.0) {
        return Ok(CsmEstimate {
            maps: Array3::zeros((coils, ky, kx)),
            support: Array2::from_elem((ky, kx), false),
            acs_lines,
        });
    }
    check_acs_from_data(y, acs_lines)?;
    Ok(estimate_from_acs(y, acs_lines))
}

/// Same as [`estimate_csm`] but verifies calibration coverage against an
/// explicit `frames x ky x kx` sampling pattern.
pub fn estimate_csm_masked(
    y: &Array4<Complex64>,
    mask: &Array3<bool>,
    acs_lines: usize,
) -> Result<CsmEstimate> {
    let (_, frames, ky, kx) = y.dim();
    if mask.dim() != (frames, ky, kx) {
        return Err(Error::ExtentMismatch(format!(
            "mask {:?} vs k-space frames/ky/kx {:?}",
            mask.dim(),
            (frames, ky, kx)
        )));
    }
    if acs_lines > ky {
        return Err(Error::InvalidParameter(format!(
            "acs_lines {acs_lines} exceeds ky extent {ky}"
        )));
    }
    for t in 0..frames {
        for k in acs_range(ky, acs_lines) {
            if !mask.slice(s![t, k, ..]).iter().all(|&m| m) {
                return Err(Error::AcsNotSampled(format!(
                    "frame {t}, ky line {k} is not fully sampled"
                )));
            }
        }
    }
    if acs_lines < 8 {
        return Err(Error::InvalidParameter(format!(
            "acs_lines must be >= 8, got {acs_lines}"
        )));
    }
    Ok(estimate_from_acs(y, acs_lines))
}

fn estimate_from_acs(y: &Array4<Complex64>, acs_lines: usize) -> CsmEstimate {
    let (coils, frames, ky, kx) = y.dim();
    let rows = acs_range(ky, acs_lines);
    let fft = Fft2c::new(ky, kx);
    let mut imgs = Array3::<Complex64>::zeros((coils, ky, kx));
    for (c, mut img) in imgs.axis_iter_mut(Axis(0)).enumerate() {
        // frame average of the calibration block, zero-padded to full size
        let block = y
            .slice(s![c, .., rows.clone(), ..])
            .mean_axis(Axis(0))
            .expect("at least one frame");
        debug_assert!(frames > 0);
        img.slice_mut(s![rows.clone(), ..]).assign(&block);
        fft.inverse_inplace(img.view_mut());
    }
    let rss = imgs.map_axis(Axis(0), |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
    let peak = rss.iter().cloned().fold(0.0, f64::max);
    let threshold = CSM_SUPPORT_THRESHOLD * peak;
    let support = rss.mapv(|r| peak > 0.0 && r > threshold);
    let mut maps = imgs;
    for mut coil in maps.axis_iter_mut(Axis(0)) {
        ndarray::Zip::from(&mut coil)
            .and(&rss)
            .and(&support)
            .for_each(|s, &r, &inside| {
                *s = if inside { *s / r } else { Complex64::default() };
            });
    }
    CsmEstimate {
        maps,
        support,
        acs_lines,
    }
}
