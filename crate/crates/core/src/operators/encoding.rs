//! Multi-coil encoding operator `E = M F S` and its adjoint.

use ndarray::{s, Array2, Array3, Array4, ArrayView2, ArrayView3, Axis, Zip};
use num_complex::Complex64;

use super::fft::Fft2c;
use crate::error::{Error, Result};

/// Coil maps are `coils x ky x kx`; the sampling pattern is `frames x ky x kx`.
#[derive(Debug, Clone)]
pub struct EncodingOperator {
    maps: Array3<Complex64>,
    mask: Array3<bool>,
    fft: Fft2c,
}

impl EncodingOperator {
    pub fn new(maps: Array3<Complex64>, mask: Array3<bool>) -> Result<Self> {
        let (_, ky, kx) = maps.dim();
        let (_, mky, mkx) = mask.dim();
        if (ky, kx) != (mky, mkx) {
            return Err(Error::ExtentMismatch(format!(
                "coil maps are {ky}x{kx}, mask is {mky}x{mkx}"
            )));
        }
        if maps.dim().0 == 0 || mask.dim().0 == 0 {
            return Err(Error::ExtentMismatch("no coils or no frames".into()));
        }
        Ok(Self {
            maps,
            mask,
            fft: Fft2c::new(ky, kx),
        })
    }

    pub fn coils(&self) -> usize {
        self.maps.dim().0
    }

    pub fn frames(&self) -> usize {
        self.mask.dim().0
    }

    pub fn matrix(&self) -> (usize, usize) {
        (self.maps.dim().1, self.maps.dim().2)
    }

    pub fn maps(&self) -> &Array3<Complex64> {
        &self.maps
    }

    pub fn mask(&self) -> &Array3<bool> {
        &self.mask
    }

    fn check_image(&self, x: &Array3<Complex64>) -> Result<()> {
        let (ky, kx) = self.matrix();
        if x.dim() != (self.frames(), ky, kx) {
            return Err(Error::ExtentMismatch(format!(
                "image is {:?}, operator expects {:?}",
                x.dim(),
                (self.frames(), ky, kx)
            )));
        }
        Ok(())
    }

    fn check_kspace(&self, y: &Array4<Complex64>) -> Result<()> {
        let (ky, kx) = self.matrix();
        let want = (self.coils(), self.frames(), ky, kx);
        if y.dim() != want {
            return Err(Error::ExtentMismatch(format!(
                "k-space is {:?}, operator expects {want:?}",
                y.dim()
            )));
        }
        Ok(())
    }

    /// One frame forward: returns `coils x ky x kx`.
    pub fn apply_frame(&self, t: usize, x: ArrayView2<Complex64>) -> Array3<Complex64> {
        let mask = self.mask.index_axis(Axis(0), t);
        let mut out = Array3::zeros(self.maps.dim());
        for (c, mut yc) in out.axis_iter_mut(Axis(0)).enumerate() {
            Zip::from(&mut yc)
                .and(&self.maps.index_axis(Axis(0), c))
                .and(&x)
                .for_each(|y, &s, &v| *y = s * v);
            self.fft.forward_inplace(yc.view_mut());
            Zip::from(&mut yc).and(&mask).for_each(|y, &m| {
                if !m {
                    *y = Complex64::default();
                }
            });
        }
        out
    }

    /// One frame adjoint from `coils x ky x kx` data.
    pub fn adjoint_frame(&self, t: usize, y: ArrayView3<Complex64>) -> Array2<Complex64> {
        let mask = self.mask.index_axis(Axis(0), t);
        let (ky, kx) = self.matrix();
        let mut acc = Array2::zeros((ky, kx));
        let mut buf = Array2::zeros((ky, kx));
        for (c, yc) in y.axis_iter(Axis(0)).enumerate() {
            Zip::from(&mut buf).and(&yc).and(&mask).for_each(|b, &v, &m| {
                *b = if m { v } else { Complex64::default() };
            });
            self.fft.inverse_inplace(buf.view_mut());
            Zip::from(&mut acc)
                .and(&self.maps.index_axis(Axis(0), c))
                .and(&buf)
                .for_each(|a, &s, &b| *a += s.conj() * b);
        }
        acc
    }

    /// `E^H E x` for one frame without materialising all coils at once.
    pub fn normal_frame(&self, t: usize, x: ArrayView2<Complex64>) -> Array2<Complex64> {
        let mask = self.mask.index_axis(Axis(0), t);
        let (ky, kx) = self.matrix();
        let mut acc = Array2::zeros((ky, kx));
        let mut buf = Array2::zeros((ky, kx));
        for s in self.maps.axis_iter(Axis(0)) {
            Zip::from(&mut buf).and(&s).and(&x).for_each(|b, &s, &v| *b = s * v);
            self.fft.forward_inplace(buf.view_mut());
            Zip::from(&mut buf).and(&mask).for_each(|b, &m| {
                if !m {
                    *b = Complex64::default();
                }
            });
            self.fft.inverse_inplace(buf.view_mut());
            Zip::from(&mut acc)
                .and(&s)
                .and(&buf)
                .for_each(|a, &s, &b| *a += s.conj() * b);
        }
        acc
    }

    pub fn apply(&self, x: &Array3<Complex64>) -> Result<Array4<Complex64>> {
        self.check_image(x)?;
        let (ky, kx) = self.matrix();
        let mut y = Array4::zeros((self.coils(), self.frames(), ky, kx));
        for t in 0..self.frames() {
            let yt = self.apply_frame(t, x.index_axis(Axis(0), t));
            y.slice_mut(s![.., t, .., ..]).assign(&yt);
        }
        Ok(y)
    }

    pub fn adjoint(&self, y: &Array4<Complex64>) -> Result<Array3<Complex64>> {
        self.check_kspace(y)?;
        let (ky, kx) = self.matrix();
        let mut x = Array3::zeros((self.frames(), ky, kx));
        for t in 0..self.frames() {
            let xt = self.adjoint_frame(t, y.slice(s![.., t, .., ..]));
            x.index_axis_mut(Axis(0), t).assign(&xt);
        }
        Ok(x)
    }

    pub fn normal(&self, x: &Array3<Complex64>) -> Result<Array3<Complex64>> {
        self.check_image(x)?;
        let mut out = Array3::zeros(x.dim());
        for t in 0..self.frames() {
            let v = self.normal_frame(t, x.index_axis(Axis(0), t));
            out.index_axis_mut(Axis(0), t).assign(&v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{inner, norm, test_rng};
    use rand::Rng;

    fn rand_c(rng: &mut impl Rng) -> Complex64 {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    fn random_op(seed: u64) -> EncodingOperator {
        let mut rng = test_rng(seed);
        let maps = Array3::from_shape_fn((3, 16, 12), |_| rand_c(&mut rng));
        let mask = Array3::from_shape_fn((2, 16, 12), |_| rng.random_bool(0.4));
        EncodingOperator::new(maps, mask).unwrap()
    }

    #[test]
    fn adjoint_dot_product() {
        for seed in 0..5 {
            let op = random_op(seed);
            let mut rng = test_rng(100 + seed);
            let x = Array3::from_shape_fn((2, 16, 12), |_| rand_c(&mut rng));
            let y = Array4::from_shape_fn((3, 2, 16, 12), |_| rand_c(&mut rng));
            let ex = op.apply(&x).unwrap();
            let lhs = inner(&ex, &y);
            let rhs = inner(&x, &op.adjoint(&y).unwrap());
            let rel = (lhs - rhs).norm() / (norm(&ex) * norm(&y) + 1e-30);
            assert!(rel < 1e-10, "seed {seed}: {rel}");
        }
    }

    #[test]
    fn masked_entries_are_zero_and_normal_matches_composition() {
        let op = random_op(9);
        let mut rng = test_rng(10);
        let x = Array3::from_shape_fn((2, 16, 12), |_| rand_c(&mut rng));
        let ex = op.apply(&x).unwrap();
        for ((_, t, i, j), v) in ex.indexed_iter() {
            if !op.mask()[[t, i, j]] {
                assert_eq!(*v, Complex64::default());
            }
        }
        let composed = op.adjoint(&ex).unwrap();
        let normal = op.normal(&x).unwrap();
        assert!(norm(&(&composed - &normal)) / norm(&composed) < 1e-12);
    }

    #[test]
    fn extent_mismatch_is_reported() {
        let op = random_op(1);
        assert!(op.apply(&Array3::zeros((2, 16, 10))).is_err());
        assert!(op.adjoint(&Array4::zeros((2, 2, 16, 12))).is_err());
        let maps = Array3::zeros((1, 8, 8));
        assert!(EncodingOperator::new(maps, Array3::from_elem((1, 8, 6), true)).is_err());
    }
}
