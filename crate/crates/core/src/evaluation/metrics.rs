//! SSIM, PSNR and NMSE on magnitude volumes (`frames x ky x kx`).
//!
//! SSIM uses a 7x7 uniform window over valid positions only, K1 = 0.01,
//! K2 = 0.03, sample covariance, and the data range `max(ref) - min(ref)`
//! of the whole volume; the score is the mean of per-frame 2-D SSIM.
//! PSNR uses the same volume range and is capped at [`PSNR_CAP_DB`].

use ndarray::{Array2, Array3, ArrayView2, Axis, Zip};

use crate::error::{Error, Result};

pub const SSIM_WINDOW: usize = 7;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const PSNR_CAP_DB: f64 = 300.0;

/// Human-readable statement of the metric conventions, used in report headers.
pub const METRIC_CONVENTIONS: &str = "SSIM: 7x7 uniform window (valid region, sample covariance), K1=0.01, K2=0.03, \
     data range = max(ref)-min(ref) over the volume, mean of per-frame 2-D SSIM; \
     PSNR: 10*log10(range^2/MSE) over the volume, capped at 300 dB; NMSE: ||pred-ref||^2/||ref||^2";

fn check_dims(pred: &Array3<f64>, reference: &Array3<f64>) -> Result<()> {
    if pred.dim() != reference.dim() {
        return Err(Error::ExtentMismatch(format!(
            "prediction {:?} vs reference {:?}",
            pred.dim(),
            reference.dim()
        )));
    }
    Ok(())
}

pub fn data_range(reference: &Array3<f64>) -> Result<f64> {
    let (lo, hi) = reference
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(Error::UndefinedRange);
    }
    Ok(range)
}

/// Summed-area table with a zero top row and left column.
fn integral(a: &Array2<f64>) -> Array2<f64> {
    let (ny, nx) = a.dim();
    let mut s = Array2::zeros((ny + 1, nx + 1));
    for i in 0..ny {
        let mut row = 0.0;
        for j in 0..nx {
            row += a[[i, j]];
            s[[i + 1, j + 1]] = s[[i, j + 1]] + row;
        }
    }
    s
}

fn window_sum(s: &Array2<f64>, i: usize, j: usize, w: usize) -> f64 {
    s[[i + w, j + w]] - s[[i, j + w]] - s[[i + w, j]] + s[[i, j]]
}

/// Mean SSIM of one 2-D frame over all valid 7x7 window positions.
pub fn ssim_2d(pred: ArrayView2<f64>, reference: ArrayView2<f64>, range: f64) -> Result<f64> {
    let (ny, nx) = reference.dim();
    let w = SSIM_WINDOW;
    if ny < w || nx < w {
        return Err(Error::ExtentMismatch(format!(
            "frame {ny}x{nx} smaller than the {w}x{w} SSIM window"
        )));
    }
    let x = pred.to_owned();
    let y = reference.to_owned();
    let sx = integral(&x);
    let sy = integral(&y);
    let sxx = integral(&(&x * &x));
    let syy = integral(&(&y * &y));
    let sxy = integral(&(&x * &y));
    let np = (w * w) as f64;
    let cov_norm = np / (np - 1.0);
    let c1 = (SSIM_K1 * range).powi(2);
    let c2 = (SSIM_K2 * range).powi(2);
    let mut total = 0.0;
    for i in 0..=(ny - w) {
        for j in 0..=(nx - w) {
            let ux = window_sum(&sx, i, j, w) / np;
            let uy = window_sum(&sy, i, j, w) / np;
            let vx = cov_norm * (window_sum(&sxx, i, j, w) / np - ux * ux);
            let vy = cov_norm * (window_sum(&syy, i, j, w) / np - uy * uy);
            let vxy = cov_norm * (window_sum(&sxy, i, j, w) / np - ux * uy);
            let num = (2.0 * ux * uy + c1) * (2.0 * vxy + c2);
            let den = (ux * ux + uy * uy + c1) * (vx + vy + c2);
            total += num / den;
        }
    }
    Ok(total / ((ny - w + 1) * (nx - w + 1)) as f64)
}

pub fn compute_ssim(pred: &Array3<f64>, reference: &Array3<f64>) -> Result<f64> {
    check_dims(pred, reference)?;
    let range = data_range(reference)?;
    let mut sum = 0.0;
    for (p, r) in pred.axis_iter(Axis(0)).zip(reference.axis_iter(Axis(0))) {
        sum += ssim_2d(p, r, range)?;
    }
    Ok(sum / reference.dim().0 as f64)
}

pub fn compute_psnr(pred: &Array3<f64>, reference: &Array3<f64>) -> Result<f64> {
    check_dims(pred, reference)?;
    let range = data_range(reference)?;
    let sse = Zip::from(pred)
        .and(reference)
        .fold(0.0, |acc, &p, &r| acc + (p - r) * (p - r));
    let mse = sse / reference.len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (range * range / mse).log10()).min(PSNR_CAP_DB))
}

pub fn compute_nmse(pred: &Array3<f64>, reference: &Array3<f64>) -> Result<f64> {
    check_dims(pred, reference)?;
    let (err, energy) = Zip::from(pred)
        .and(reference)
        .fold((0.0, 0.0), |(e, n), &p, &r| (e + (p - r) * (p - r), n + r * r));
    if energy == 0.0 {
        return Err(Error::UndefinedRange);
    }
    Ok(err / energy)
}
