//! Flat row-major containers for complex, real and mask arrays.
//!
//! Containers are single precision on purpose; solvers and metrics promote to
//! `f64` through the `to_*` helpers and demote on the way back out.

use ndarray::{Array, Array3, Array4, ArrayBase, Data, Dimension, IxDyn};
use num_complex::{Complex32, Complex64};

use crate::error::{Error, Result};

fn check_len(dims: &[usize], len: usize) -> Result<()> {
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::Invariant(format!("zero extent in dims {dims:?}")));
    }
    let n: usize = dims.iter().product();
    if n != len {
        return Err(Error::Invariant(format!(
            "dims {dims:?} imply {n} samples, got {len}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexArray {
    dims: Vec<usize>,
    data: Vec<Complex32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealArray {
    dims: Vec<usize>,
    data: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskArray {
    dims: Vec<usize>,
    data: Vec<u8>,
}

impl ComplexArray {
    pub fn new(dims: Vec<usize>, data: Vec<Complex32>) -> Result<Self> {
        check_len(&dims, data.len())?;
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[Complex32] {
        &self.data
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.data
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
    }

    pub fn from_c64<S, D>(a: &ArrayBase<S, D>) -> Self
    where
        S: Data<Elem = Complex64>,
        D: Dimension,
    {
        Self {
            dims: a.shape().to_vec(),
            data: a
                .iter()
                .map(|c| Complex32::new(c.re as f32, c.im as f32))
                .collect(),
        }
    }

    pub fn to_c64(&self) -> Array<Complex64, IxDyn> {
        let data = self
            .data
            .iter()
            .map(|c| Complex64::new(c.re as f64, c.im as f64))
            .collect();
        Array::from_shape_vec(IxDyn(&self.dims), data).expect("dims checked at construction")
    }

    pub fn to_array3(&self) -> Result<Array3<Complex64>> {
        self.to_c64()
            .into_dimensionality()
            .map_err(|_| Error::ExtentMismatch(format!("expected 3-D array, got {:?}", self.dims)))
    }

    pub fn to_array4(&self) -> Result<Array4<Complex64>> {
        self.to_c64()
            .into_dimensionality()
            .map_err(|_| Error::ExtentMismatch(format!("expected 4-D array, got {:?}", self.dims)))
    }
}

impl RealArray {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        check_len(&dims, data.len())?;
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|v| !v.is_finite())
    }

    pub fn from_f64<S, D>(a: &ArrayBase<S, D>) -> Self
    where
        S: Data<Elem = f64>,
        D: Dimension,
    {
        Self {
            dims: a.shape().to_vec(),
            data: a.iter().map(|&v| v as f32).collect(),
        }
    }

    pub fn to_f64(&self) -> Array<f64, IxDyn> {
        let data = self.data.iter().map(|&v| v as f64).collect();
        Array::from_shape_vec(IxDyn(&self.dims), data).expect("dims checked at construction")
    }

    pub fn to_array3(&self) -> Result<Array3<f64>> {
        self.to_f64()
            .into_dimensionality()
            .map_err(|_| Error::ExtentMismatch(format!("expected 3-D array, got {:?}", self.dims)))
    }
}

impl MaskArray {
    pub fn new(dims: Vec<usize>, data: Vec<u8>) -> Result<Self> {
        check_len(&dims, data.len())?;
        if let Some(i) = data.iter().position(|&b| b > 1) {
            return Err(Error::Invariant(format!(
                "mask element {i} has value {}, expected 0 or 1",
                data[i]
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

/// Any array the CXA container can hold, tagged by its on-disk dtype.
#[derive(Debug, Clone, PartialEq)]
pub enum CxaArray {
    Complex(ComplexArray),
    Real(RealArray),
    Mask(MaskArray),
}

impl CxaArray {
    pub fn dtype_code(&self) -> u8 {
        match self {
            CxaArray::Complex(_) => 1,
            CxaArray::Real(_) => 2,
            CxaArray::Mask(_) => 3,
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            CxaArray::Complex(a) => a.dims(),
            CxaArray::Real(a) => a.dims(),
            CxaArray::Mask(a) => a.dims(),
        }
    }

    /// Flat index of the first NaN/Inf sample, if any. Masks are always finite.
    pub fn first_non_finite(&self) -> Option<usize> {
        match self {
            CxaArray::Complex(a) => a.first_non_finite(),
            CxaArray::Real(a) => a.first_non_finite(),
            CxaArray::Mask(_) => None,
        }
    }

    pub fn into_complex(self) -> Result<ComplexArray> {
        match self {
            CxaArray::Complex(a) => Ok(a),
            other => Err(Error::ExtentMismatch(format!(
                "expected complex array, found dtype {}",
                other.dtype_code()
            ))),
        }
    }

    pub fn into_real(self) -> Result<RealArray> {
        match self {
            CxaArray::Real(a) => Ok(a),
            other => Err(Error::ExtentMismatch(format!(
                "expected real array, found dtype {}",
                other.dtype_code()
            ))),
        }
    }

    pub fn into_mask(self) -> Result<MaskArray> {
        match self {
            CxaArray::Mask(a) => Ok(a),
            other => Err(Error::ExtentMismatch(format!(
                "expected mask array, found dtype {}",
                other.dtype_code()
            ))),
        }
    }
}

impl From<ComplexArray> for CxaArray {
    fn from(a: ComplexArray) -> Self {
        CxaArray::Complex(a)
    }
}

impl From<RealArray> for CxaArray {
    fn from(a: RealArray) -> Self {
        CxaArray::Real(a)
    }
}

impl From<MaskArray> for CxaArray {
    fn from(a: MaskArray) -> Self {
        CxaArray::Mask(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_must_match_dims() {
        assert!(RealArray::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(RealArray::new(vec![2, 0], vec![]).is_err());
        assert!(RealArray::new(vec![2, 3], vec![0.0; 6]).is_ok());
    }

    #[test]
    fn mask_rejects_values_above_one() {
        let err = MaskArray::new(vec![3], vec![0, 1, 2]).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
    }

    #[test]
    fn ndarray_conversion_keeps_row_major_order() {
        let a = ndarray::Array::from_shape_fn((2, 3), |(i, j)| (i * 3 + j) as f64);
        let r = RealArray::from_f64(&a);
        assert_eq!(r.data(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(r.to_f64().into_dimensionality::<ndarray::Ix2>().unwrap(), a);
    }
}
