//! Isotropic total variation on complex 2-D images: finite differences,
//! their negative adjoint, a one-step shrinkage refinement and the
//! dual-projection proximal operator.

use ndarray::{Array2, ArrayView2, Zip};
use num_complex::Complex64;

/// Forward differences along kx and ky with a zero last difference.
pub fn gradient(x: ArrayView2<Complex64>) -> (Array2<Complex64>, Array2<Complex64>) {
    let (ny, nx) = x.dim();
    let mut gx = Array2::zeros((ny, nx));
    let mut gy = Array2::zeros((ny, nx));
    for i in 0..ny {
        for j in 0..nx {
            if j + 1 < nx {
                gx[[i, j]] = x[[i, j + 1]] - x[[i, j]];
            }
            if i + 1 < ny {
                gy[[i, j]] = x[[i + 1, j]] - x[[i, j]];
            }
        }
    }
    (gx, gy)
}

/// Discrete divergence, the negative adjoint of [`gradient`].
pub fn divergence(px: &Array2<Complex64>, py: &Array2<Complex64>) -> Array2<Complex64> {
    let (ny, nx) = px.dim();
    Array2::from_shape_fn((ny, nx), |(i, j)| {
        let dx = if nx == 1 {
            Complex64::default()
        } else if j == 0 {
            px[[i, j]]
        } else if j == nx - 1 {
            -px[[i, j - 1]]
        } else {
            px[[i, j]] - px[[i, j - 1]]
        };
        let dy = if ny == 1 {
            Complex64::default()
        } else if i == 0 {
            py[[i, j]]
        } else if i == ny - 1 {
            -py[[i - 1, j]]
        } else {
            py[[i, j]] - py[[i - 1, j]]
        };
        dx + dy
    })
}

pub fn total_variation(x: ArrayView2<Complex64>) -> f64 {
    let (gx, gy) = gradient(x);
    Zip::from(&gx)
        .and(&gy)
        .fold(0.0, |acc, a, b| acc + (a.norm_sqr() + b.norm_sqr()).sqrt())
}

/// Soft-threshold the isotropic gradient field at `threshold`, then take
/// one Landweber step (size 1/8) pulling the image's gradient toward the
/// shrunk field.
pub fn shrinkage_refine(x: &Array2<Complex64>, threshold: f64) -> Array2<Complex64> {
    if threshold <= 0.0 {
        return x.clone();
    }
    let (mut gx, mut gy) = gradient(x.view());
    // keep only the part removed by shrinkage: g - shrink(g)
    Zip::from(&mut gx).and(&mut gy).for_each(|a, b| {
        let m = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let keep = if m > threshold { threshold / m } else { 1.0 };
        *a *= keep;
        *b *= keep;
    });
    let d = divergence(&gx, &gy);
    x + &(d * 0.125)
}

/// Dual variable for the TV proximal operator, kept across calls so ADMM
/// can warm-start it.
#[derive(Debug, Clone)]
pub struct TvDual {
    px: Array2<Complex64>,
    py: Array2<Complex64>,
}

impl TvDual {
    pub fn zeros(dim: (usize, usize)) -> Self {
        Self {
            px: Array2::zeros(dim),
            py: Array2::zeros(dim),
        }
    }
}

/// `argmin_x 0.5 ||x - v||^2 + weight * TV(x)` by dual projection with step 1/8.
pub fn tv_prox(v: &Array2<Complex64>, weight: f64, iters: usize, dual: &mut TvDual) -> Array2<Complex64> {
    if weight <= 0.0 {
        return v.clone();
    }
    let tau = 0.125;
    let inv = 1.0 / weight;
    for _ in 0..iters {
        let mut w = divergence(&dual.px, &dual.py);
        w.zip_mut_with(v, |w, &v| *w -= v * inv);
        let (gx, gy) = gradient(w.view());
        Zip::from(&mut dual.px)
            .and(&mut dual.py)
            .and(&gx)
            .and(&gy)
            .for_each(|px, py, &gx, &gy| {
                let m = (gx.norm_sqr() + gy.norm_sqr()).sqrt();
                let denom = 1.0 + tau * m;
                *px = (*px + gx * tau) / denom;
                *py = (*py + gy * tau) / denom;
            });
    }
    let d = divergence(&dual.px, &dual.py);
    v - &(d * weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{inner, test_rng};
    use rand::Rng;

    fn random(dim: (usize, usize), seed: u64) -> Array2<Complex64> {
        let mut rng = test_rng(seed);
        Array2::from_shape_fn(dim, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn divergence_is_negative_adjoint() {
        let x = random((9, 7), 1);
        let px = random((9, 7), 2);
        let py = random((9, 7), 3);
        let (gx, gy) = gradient(x.view());
        let lhs = inner(&gx, &px) + inner(&gy, &py);
        let rhs = -inner(&x, &divergence(&px, &py));
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn constant_image_is_fixed() {
        let c = Array2::from_elem((8, 8), Complex64::new(0.7, -0.2));
        let mut dual = TvDual::zeros((8, 8));
        let out = tv_prox(&c, 0.5, 20, &mut dual);
        assert!(out.iter().zip(c.iter()).all(|(a, b)| (a - b).norm() < 1e-14));
        let refined = shrinkage_refine(&c, 0.5);
        assert!(refined.iter().zip(c.iter()).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn prox_reduces_total_variation_of_noisy_image() {
        let v = random((16, 16), 4);
        let mut dual = TvDual::zeros((16, 16));
        let out = tv_prox(&v, 0.2, 50, &mut dual);
        assert!(total_variation(out.view()) < total_variation(v.view()));
    }

    #[test]
    fn prox_objective_beats_identity() {
        let v = random((12, 12), 5);
        let w = 0.1;
        let mut dual = TvDual::zeros((12, 12));
        let x = tv_prox(&v, w, 100, &mut dual);
        let obj = |x: &Array2<Complex64>| {
            0.5 * x.iter().zip(v.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
                + w * total_variation(x.view())
        };
        assert!(obj(&x) < obj(&v));
    }
}
