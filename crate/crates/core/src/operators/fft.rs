//! Centered, orthonormal 2-D DFT.
//!
//! DC sits at index `(ky / 2, kx / 2)` and both directions scale by
//! `1 / sqrt(ky * kx)`, so the transform is unitary.

use std::sync::Arc;

use ndarray::{Array2, ArrayViewMut2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Fft2c {
    ky: usize,
    kx: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2c {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2c")
            .field("ky", &self.ky)
            .field("kx", &self.kx)
            .finish()
    }
}

/// Centered transform of every length-`n` line. Even lengths use the
/// `(-1)^k` modulation applied by the caller instead of shifting.
fn centered_lines(buf: &mut [Complex64], n: usize, fft: &dyn Fft<f64>, scratch: &mut [Complex64]) {
    if n % 2 == 0 {
        fft.process_with_scratch(buf, scratch);
        return;
    }
    for line in buf.chunks_exact_mut(n) {
        line.rotate_left(n / 2);
    }
    fft.process_with_scratch(buf, scratch);
    for line in buf.chunks_exact_mut(n) {
        line.rotate_right(n / 2);
    }
}

/// `dst` (cols x rows) = transpose of `src` (rows x cols), in cache blocks.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 16;
    for i0 in (0..rows).step_by(B) {
        for j0 in (0..cols).step_by(B) {
            for i in i0..(i0 + B).min(rows) {
                for j in j0..(j0 + B).min(cols) {
                    dst[j * rows + i] = src[i * cols + j];
                }
            }
        }
    }
}

impl Fft2c {
    pub fn new(ky: usize, kx: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            ky,
            kx,
            row_fwd: planner.plan_fft_forward(kx),
            row_inv: planner.plan_fft_inverse(kx),
            col_fwd: planner.plan_fft_forward(ky),
            col_inv: planner.plan_fft_inverse(ky),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ky, self.kx)
    }

    fn apply(&self, mut x: ArrayViewMut2<Complex64>, forward: bool) {
        assert_eq!(x.dim(), (self.ky, self.kx), "fft2c extent mismatch");
        let (row, col) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        let scale = 1.0 / ((self.ky * self.kx) as f64).sqrt();

        let (ky, kx) = (self.ky, self.kx);
        let mut scratch = vec![Complex64::default(); row.get_inplace_scratch_len().max(col.get_inplace_scratch_len())];
        // (-1)^(i+j) on the even axes, before and after; (-1)^(n/2) per even axis overall
        let sign = |i: usize, j: usize| {
            let odd = (ky % 2 == 0 && i % 2 == 1) ^ (kx % 2 == 0 && j % 2 == 1);
            if odd { -1.0 } else { 1.0 }
        };
        let global = [ky, kx].iter().filter(|&&n| n % 2 == 0 && (n / 2) % 2 == 1).count() % 2;
        let scale = if global == 1 { -scale } else { scale };

        let mut rows = vec![Complex64::default(); ky * kx];
        for ((i, j), v) in x.indexed_iter() {
            rows[i * kx + j] = v * sign(i, j);
        }
        centered_lines(&mut rows, kx, row.as_ref(), &mut scratch);
        let mut cols = vec![Complex64::default(); ky * kx];
        transpose(&rows, &mut cols, ky, kx);
        centered_lines(&mut cols, ky, col.as_ref(), &mut scratch);
        transpose(&cols, &mut rows, kx, ky);
        for ((i, j), v) in x.indexed_iter_mut() {
            *v = rows[i * kx + j] * (scale * sign(i, j));
        }
    }

    pub fn forward_inplace(&self, x: ArrayViewMut2<Complex64>) {
        self.apply(x, true);
    }

    pub fn inverse_inplace(&self, x: ArrayViewMut2<Complex64>) {
        self.apply(x, false);
    }

    /// Transform every trailing 2-D slice of a 3-D stack (e.g. frames x ky x kx).
    pub fn forward_stack(&self, x: &mut ndarray::Array3<Complex64>) {
        for slice in x.axis_iter_mut(Axis(0)) {
            self.forward_inplace(slice);
        }
    }

    pub fn inverse_stack(&self, x: &mut ndarray::Array3<Complex64>) {
        for slice in x.axis_iter_mut(Axis(0)) {
            self.inverse_inplace(slice);
        }
    }
}

pub fn fft2c(x: &Array2<Complex64>) -> Array2<Complex64> {
    let (ky, kx) = x.dim();
    let mut y = x.clone();
    Fft2c::new(ky, kx).forward_inplace(y.view_mut());
    y
}

pub fn ifft2c(y: &Array2<Complex64>) -> Array2<Complex64> {
    let (ky, kx) = y.dim();
    let mut x = y.clone();
    Fft2c::new(ky, kx).inverse_inplace(x.view_mut());
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::test_rng;
    use rand::Rng;

    fn random(ky: usize, kx: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = test_rng(seed);
        Array2::from_shape_fn((ky, kx), |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn norm(a: &Array2<Complex64>) -> f64 {
        a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Direct O(N^2) centered DFT used as an oracle.
    fn naive_fft2c(x: &Array2<Complex64>) -> Array2<Complex64> {
        let (ky, kx) = x.dim();
        let scale = 1.0 / ((ky * kx) as f64).sqrt();
        Array2::from_shape_fn((ky, kx), |(u, v)| {
            let mut acc = Complex64::default();
            for ((i, j), val) in x.indexed_iter() {
                let fy = (u as f64 - (ky / 2) as f64) * (i as f64 - (ky / 2) as f64) / ky as f64;
                let fx = (v as f64 - (kx / 2) as f64) * (j as f64 - (kx / 2) as f64) / kx as f64;
                let phase = -2.0 * std::f64::consts::PI * (fy + fx);
                acc += val * Complex64::from_polar(1.0, phase);
            }
            acc * scale
        })
    }

    #[test]
    fn center_delta_gives_flat_spectrum() {
        let (ky, kx) = (8, 6);
        let mut x = Array2::zeros((ky, kx));
        x[[ky / 2, kx / 2]] = Complex64::new(1.0, 0.0);
        let y = fft2c(&x);
        let expect = 1.0 / ((ky * kx) as f64).sqrt();
        for v in y.iter() {
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_dft_on_even_and_odd_extents() {
        for &(ky, kx) in &[(8, 6), (5, 7), (6, 9)] {
            let x = random(ky, kx, 3);
            let fast = fft2c(&x);
            let slow = naive_fft2c(&x);
            let err = norm(&(&fast - &slow)) / norm(&slow);
            assert!(err < 1e-12, "({ky},{kx}) err {err}");
        }
    }

    #[test]
    fn roundtrip_and_parseval() {
        let x = random(32, 24, 7);
        let y = fft2c(&x);
        assert!(((norm(&y) - norm(&x)) / norm(&x)).abs() < 1e-6);
        let back = ifft2c(&y);
        assert!(norm(&(&back - &x)) / norm(&x) < 1e-6);
    }
}
