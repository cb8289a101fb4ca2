use std::time::Instant;

use ndarray::{s, Array2, Array3, Array4, Axis};
use num_complex::Complex64;
use rand::Rng;

use super::cg::conjugate_gradient;
use super::tv::{shrinkage_refine, tv_prox, TvDual};
use super::{Method, ReconConfig, ReconResult};
use crate::error::{Error, Result};
use crate::operators::{EncodingOperator, Fft2c};
use crate::sampling::SamplingMask;
use crate::util::{has_non_finite, norm, norm_sqr, seeded_rng};

const POWER_ITERATIONS: usize = 20;

fn check_extents(y: &Array4<Complex64>, mask: &SamplingMask) -> Result<()> {
    let (_, frames, ky, kx) = y.dim();
    if (mask.frames(), mask.ky(), mask.kx) != (frames, ky, kx) {
        return Err(Error::ExtentMismatch(format!(
            "k-space frames/ky/kx {:?} vs mask {:?}",
            (frames, ky, kx),
            (mask.frames(), mask.ky(), mask.kx)
        )));
    }
    Ok(())
}

fn operator(y: &Array4<Complex64>, mask: &SamplingMask, csm: &Array3<Complex64>) -> Result<EncodingOperator> {
    check_extents(y, mask)?;
    if csm.dim().0 != y.dim().0 {
        return Err(Error::ExtentMismatch(format!(
            "{} coil maps for {} coils of k-space",
            csm.dim().0,
            y.dim().0
        )));
    }
    EncodingOperator::new(csm.clone(), mask.to_grid())
}

struct Timer {
    start: Instant,
    frames: usize,
}

impl Timer {
    fn start(frames: usize) -> Self {
        Self {
            start: Instant::now(),
            frames,
        }
    }

    fn finish(&self) -> (f64, f64) {
        let v = self.start.elapsed().as_secs_f64();
        (v, v / self.frames.max(1) as f64)
    }
}

fn magnitude(x: &Array3<Complex64>) -> Array3<f64> {
    x.mapv(|c| c.norm())
}

/// Per-frame root-sum-of-squares of the zero-filled coil images.
pub fn recon_zero_fill_rss(y: &Array4<Complex64>, mask: &SamplingMask) -> Result<ReconResult> {
    check_extents(y, mask)?;
    let (_, frames, ky, kx) = y.dim();
    let timer = Timer::start(frames);
    let fft = Fft2c::new(ky, kx);
    let mut sos = Array3::<f64>::zeros((frames, ky, kx));
    for coil in y.axis_iter(Axis(0)) {
        for (t, yt) in coil.axis_iter(Axis(0)).enumerate() {
            let mut img = yt.to_owned();
            fft.inverse_inplace(img.view_mut());
            sos.index_axis_mut(Axis(0), t)
                .zip_mut_with(&img, |s, v| *s += v.norm_sqr());
        }
    }
    let image = sos.mapv(f64::sqrt);
    let (wall_time_volume, wall_time_frame) = timer.finish();
    Ok(ReconResult {
        method: Method::Zf,
        complex_image: image.mapv(|v| Complex64::new(v, 0.0)),
        image,
        iterations_used: 0,
        final_residual: 0.0,
        converged: true,
        residual_history: Vec::new(),
        operator_norm_sq: None,
        wall_time_volume,
        wall_time_frame,
    })
}

/// Solve `(E^H E + lambda I) x = E^H y` per frame by conjugate gradients.
pub fn recon_cg_sense(
    y: &Array4<Complex64>,
    mask: &SamplingMask,
    csm: &Array3<Complex64>,
    cfg: &ReconConfig,
) -> Result<ReconResult> {
    cfg.validate()?;
    let op = operator(y, mask, csm)?;
    let (_, frames, ky, kx) = y.dim();
    let timer = Timer::start(frames);
    let lambda = Complex64::new(cfg.tikhonov_lambda, 0.0);
    let mut x = Array3::zeros((frames, ky, kx));
    let mut iterations_used = 0;
    let mut final_residual: f64 = 0.0;
    let mut converged = true;
    let mut history: Vec<f64> = Vec::new();
    for t in 0..frames {
        let b = op.adjoint_frame(t, y.slice(s![.., t, .., ..]));
        let out = conjugate_gradient(
            |v| {
                let mut a = op.normal_frame(t, v.view());
                a.zip_mut_with(v, |a, &v| *a += lambda * v);
                a
            },
            &b,
            Array2::zeros((ky, kx)),
            cfg.max_iters,
            cfg.tolerance,
            "cgsense",
        )?;
        iterations_used = iterations_used.max(out.iterations);
        final_residual = final_residual.max(out.relative_residual);
        converged &= out.converged;
        // worst-case residual per iteration across frames
        for (k, r) in out.history.iter().enumerate() {
            match history.get_mut(k) {
                Some(h) => *h = h.max(*r),
                None => history.push(*r),
            }
        }
        x.index_axis_mut(Axis(0), t).assign(&out.x);
    }
    let (wall_time_volume, wall_time_frame) = timer.finish();
    Ok(ReconResult {
        method: Method::Cgsense,
        image: magnitude(&x),
        complex_image: x,
        iterations_used,
        final_residual,
        converged,
        residual_history: history,
        operator_norm_sq: None,
        wall_time_volume,
        wall_time_frame,
    })
}

/// Largest eigenvalue of `E^H E` by power iteration from a fixed seed.
pub fn spectral_norm_sq(op: &EncodingOperator, iterations: usize) -> Result<f64> {
    let (ky, kx) = op.matrix();
    let mut rng = seeded_rng(0x706f_7765_72);
    let mut v = Array3::from_shape_fn((op.frames(), ky, kx), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let n = norm(&v);
    v.mapv_inplace(|c| c / n);
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let w = op.normal(&v)?;
        estimate = norm(&w);
        if estimate == 0.0 {
            return Ok(0.0);
        }
        v = w.mapv(|c| c / estimate);
    }
    Ok(estimate)
}

fn dc_residual(op: &EncodingOperator, x: &Array3<Complex64>, y: &Array4<Complex64>) -> Result<f64> {
    let ex = op.apply(x)?;
    Ok(norm(&(&ex - y)))
}

/// `cascades` steps of `x <- x - eta E^H (E x - y)` on the spectrally
/// normalized operator, each followed by a fixed TV shrinkage refinement at
/// threshold `tv_weight * eta`. Starts from `x0 = E^H y`.
pub fn recon_unrolled_gd(
    y: &Array4<Complex64>,
    mask: &SamplingMask,
    csm: &Array3<Complex64>,
    cfg: &ReconConfig,
) -> Result<ReconResult> {
    cfg.validate()?;
    let op = operator(y, mask, csm)?;
    let (_, frames, _, _) = y.dim();
    let timer = Timer::start(frames);
    let lipschitz = spectral_norm_sq(&op, POWER_ITERATIONS)?;
    let mut x = op.adjoint(y)?;
    if lipschitz == 0.0 {
        x.fill(Complex64::default());
    } else {
        x.mapv_inplace(|c| c / lipschitz);
    }
    let step = if lipschitz > 0.0 { cfg.step_size / lipschitz } else { 0.0 };
    let threshold = cfg.tv_weight * cfg.step_size;
    let initial = dc_residual(&op, &x, y)?;
    let mut history = vec![initial];
    for k in 0..cfg.cascades {
        for t in 0..frames {
            let xt = x.index_axis(Axis(0), t).to_owned();
            let mut grad = op.normal_frame(t, xt.view());
            grad -= &op.adjoint_frame(t, y.slice(s![.., t, .., ..]));
            let stepped = &xt - &(grad * step);
            let refined = shrinkage_refine(&stepped, threshold);
            x.index_axis_mut(Axis(0), t).assign(&refined);
        }
        if has_non_finite(&x) {
            return Err(Error::NanDuringIteration {
                method: "unrolled_gd",
                iteration: k,
            });
        }
        let r = dc_residual(&op, &x, y)?;
        if initial > 0.0 && r > 10.0 * initial {
            return Err(Error::Diverged {
                method: "unrolled_gd",
                residual: r,
                initial,
            });
        }
        history.push(r);
    }
    let y_norm = norm(y);
    let last = *history.last().expect("initial residual recorded");
    let (wall_time_volume, wall_time_frame) = timer.finish();
    Ok(ReconResult {
        method: Method::UnrolledGd,
        image: magnitude(&x),
        complex_image: x,
        iterations_used: cfg.cascades,
        final_residual: if y_norm > 0.0 { last / y_norm } else { 0.0 },
        converged: true,
        residual_history: history,
        operator_norm_sq: Some(lipschitz),
        wall_time_volume,
        wall_time_frame,
    })
}

/// Scaled-form ADMM for `0.5 ||E x - y||^2 + tv_weight TV(x)` with the
/// splitting `x = z`:
///
/// - x: `tv_inner_iters` warm-started CG steps on `(E^H E + rho I) x = E^H y + rho (z - u)`
/// - z: TV prox of `x + u` at weight `tv_weight / rho`
/// - u: `u + x - z`
pub fn recon_admm_tv(
    y: &Array4<Complex64>,
    mask: &SamplingMask,
    csm: &Array3<Complex64>,
    cfg: &ReconConfig,
) -> Result<ReconResult> {
    cfg.validate()?;
    let op = operator(y, mask, csm)?;
    let (_, frames, ky, kx) = y.dim();
    let timer = Timer::start(frames);
    let rho = Complex64::new(cfg.rho, 0.0);
    let prox_weight = cfg.tv_weight / cfg.rho;
    let inner = cfg.tv_inner_iters.max(1);

    let rhs0: Vec<Array2<Complex64>> = (0..frames)
        .map(|t| op.adjoint_frame(t, y.slice(s![.., t, .., ..])))
        .collect();
    let mut x = Array3::<Complex64>::zeros((frames, ky, kx));
    let mut z = Array3::<Complex64>::zeros((frames, ky, kx));
    let mut u = Array3::<Complex64>::zeros((frames, ky, kx));
    let mut duals: Vec<TvDual> = (0..frames).map(|_| TvDual::zeros((ky, kx))).collect();

    let mut history = Vec::new();
    let mut iterations_used = 0;
    let mut primal = f64::INFINITY;
    let mut converged = false;
    for k in 0..cfg.max_iters {
        let mut z_change = 0.0;
        for t in 0..frames {
            let mut rhs = rhs0[t].clone();
            let zt = z.index_axis(Axis(0), t);
            let ut = u.index_axis(Axis(0), t);
            ndarray::Zip::from(&mut rhs)
                .and(&zt)
                .and(&ut)
                .for_each(|r, &z, &u| *r += rho * (z - u));
            let out = conjugate_gradient(
                |v| {
                    let mut a = op.normal_frame(t, v.view());
                    a.zip_mut_with(v, |a, &v| *a += rho * v);
                    a
                },
                &rhs,
                x.index_axis(Axis(0), t).to_owned(),
                inner,
                f64::MIN_POSITIVE,
                "admm_tv",
            )?;
            x.index_axis_mut(Axis(0), t).assign(&out.x);

            let v = &out.x + &ut;
            let z_new = tv_prox(&v, prox_weight, inner, &mut duals[t]);
            z_change += norm_sqr(&(&z_new - &zt));
            z.index_axis_mut(Axis(0), t).assign(&z_new);
            let zt = z.index_axis(Axis(0), t);
            let mut ut = u.index_axis_mut(Axis(0), t);
            ndarray::Zip::from(&mut ut)
                .and(&out.x)
                .and(&zt)
                .for_each(|u, &x, &z| *u += x - z);
        }
        if has_non_finite(&x) || has_non_finite(&z) {
            return Err(Error::NanDuringIteration {
                method: "admm_tv",
                iteration: k,
            });
        }
        iterations_used = k + 1;
        let x_norm = norm(&x).max(f64::MIN_POSITIVE);
        primal = norm(&(&x - &z)) / x_norm;
        let dual = z_change.sqrt() / norm(&z).max(f64::MIN_POSITIVE);
        history.push(dc_residual(&op, &x, y)?);
        if primal <= cfg.tolerance && dual <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let (wall_time_volume, wall_time_frame) = timer.finish();
    Ok(ReconResult {
        method: Method::AdmmTv,
        image: magnitude(&x),
        complex_image: x,
        iterations_used,
        final_residual: primal,
        converged,
        residual_history: history,
        operator_norm_sq: None,
        wall_time_volume,
        wall_time_frame,
    })
}

/// `||M E x - y|| / ||y||` over sampled locations.
pub fn data_consistency_error(
    y: &Array4<Complex64>,
    mask: &SamplingMask,
    csm: &Array3<Complex64>,
    x: &Array3<Complex64>,
) -> Result<f64> {
    let op = operator(y, mask, csm)?;
    let r = dc_residual(&op, x, y)?;
    let n = norm(y);
    Ok(if n > 0.0 { r / n } else { r })
}
