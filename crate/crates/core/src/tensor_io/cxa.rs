//! The `CXA1` binary container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "CXA1" | dtype:u8 | ndim:u8 | ndim x extent:u64 | payload
//! ```
//!
//! dtype 1 is complex64 stored as interleaved (re, im) `f32` pairs, 2 is
//! `f32`, 3 is a `u8` mask. The payload is row-major, slowest axis first, so
//! the file size is always `6 + 8 * ndim + payload_bytes`.

use std::fs;
use std::path::Path;

use num_complex::Complex32;

use super::array::{ComplexArray, CxaArray, MaskArray, RealArray};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CXA1";
const HEADER_FIXED: usize = 6;

/// Result of reading a CXA file. NaN/Inf samples are not an error for the
/// reader; they are reported here so evaluation can classify them.
#[derive(Debug, Clone, PartialEq)]
pub struct CxaRead {
    pub array: CxaArray,
    pub non_finite: Option<usize>,
}

fn element_bytes(dtype: u8) -> Result<usize> {
    match dtype {
        1 => Ok(8),
        2 => Ok(4),
        3 => Ok(1),
        other => Err(Error::UnknownDtype(other)),
    }
}

pub fn encode_cxa(array: &CxaArray) -> Result<Vec<u8>> {
    if let Some(index) = array.first_non_finite() {
        return Err(Error::NonFinite { index });
    }
    let dims = array.dims();
    if dims.len() > u8::MAX as usize {
        return Err(Error::Invariant(format!("{} dimensions exceed 255", dims.len())));
    }
    let n: usize = dims.iter().product();
    let dtype = array.dtype_code();
    let mut out = Vec::with_capacity(HEADER_FIXED + 8 * dims.len() + n * element_bytes(dtype)?);
    out.extend_from_slice(MAGIC);
    out.push(dtype);
    out.push(dims.len() as u8);
    for &d in dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    match array {
        CxaArray::Complex(a) => {
            for c in a.data() {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        CxaArray::Real(a) => {
            for v in a.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        CxaArray::Mask(a) => out.extend_from_slice(a.data()),
    }
    Ok(out)
}

pub fn decode_cxa(bytes: &[u8]) -> Result<CxaRead> {
    let truncated = |expected: usize| Error::Truncated {
        expected: expected as u64,
        found: bytes.len() as u64,
    };
    if bytes.len() < HEADER_FIXED {
        if bytes.len() >= 4 && &bytes[..4] != MAGIC {
            let mut found = [0u8; 4];
            found.copy_from_slice(&bytes[..4]);
            return Err(Error::BadMagic { found });
        }
        return Err(truncated(HEADER_FIXED));
    }
    if &bytes[..4] != MAGIC {
        let mut found = [0u8; 4];
        found.copy_from_slice(&bytes[..4]);
        return Err(Error::BadMagic { found });
    }
    let dtype = bytes[4];
    let width = element_bytes(dtype)?;
    let ndim = bytes[5] as usize;
    let header = HEADER_FIXED + 8 * ndim;
    if bytes.len() < header {
        return Err(truncated(header));
    }
    let mut dims = Vec::with_capacity(ndim);
    for chunk in bytes[HEADER_FIXED..header].chunks_exact(8) {
        let d = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        dims.push(usize::try_from(d).map_err(|_| Error::Invariant(format!("extent {d} too large")))?);
    }
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Invariant(format!("dims {dims:?} overflow")))?;
    let expected = n
        .checked_mul(width)
        .and_then(|p| p.checked_add(header))
        .ok_or_else(|| Error::Invariant(format!("dims {dims:?} overflow")))?;
    if bytes.len() < expected {
        return Err(truncated(expected));
    }
    if bytes.len() > expected {
        return Err(Error::Invariant(format!(
            "{} trailing bytes after payload",
            bytes.len() - expected
        )));
    }
    let payload = &bytes[header..];
    let f32_at = |chunk: &[u8]| f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
    let array: CxaArray = match dtype {
        1 => {
            let data = payload
                .chunks_exact(8)
                .map(|c| Complex32::new(f32_at(&c[..4]), f32_at(&c[4..])))
                .collect();
            ComplexArray::new(dims, data)?.into()
        }
        2 => RealArray::new(dims, payload.chunks_exact(4).map(f32_at).collect())?.into(),
        3 => MaskArray::new(dims, payload.to_vec())?.into(),
        _ => unreachable!("dtype validated above"),
    };
    let non_finite = array.first_non_finite();
    Ok(CxaRead { array, non_finite })
}

pub fn write_cxa(array: &CxaArray, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_cxa(array)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_cxa(path: impl AsRef<Path>) -> Result<CxaRead> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_cxa(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_complex_sample_is_22_bytes() {
        let a = ComplexArray::new(vec![1, 1], vec![Complex32::new(3.0, 4.0)]).unwrap();
        let bytes = encode_cxa(&a.into()).unwrap();
        // magic + dtype + ndim + two extents + one interleaved pair
        assert_eq!(bytes.len(), 4 + 1 + 1 + 16 + 8);
        let a = ComplexArray::new(vec![1], vec![Complex32::new(3.0, 4.0)]).unwrap();
        let bytes = encode_cxa(&a.into()).unwrap();
        assert_eq!(bytes.len(), 22);
        assert_eq!(&bytes[..4], b"CXA1");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 1);
        assert_eq!(&bytes[6..14], &1u64.to_le_bytes());
        assert_eq!(&bytes[14..18], &3.0f32.to_le_bytes());
        assert_eq!(&bytes[18..22], &4.0f32.to_le_bytes());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let a = RealArray::new(vec![2], vec![1.0, 2.0]).unwrap();
        let mut bytes = encode_cxa(&a.into()).unwrap();
        bytes[3] = b'2';
        assert!(matches!(decode_cxa(&bytes), Err(Error::BadMagic { found }) if &found == b"CXA2"));
    }

    #[test]
    fn short_payload_is_truncation() {
        let a = RealArray::new(vec![4], vec![1.0; 4]).unwrap();
        let bytes = encode_cxa(&a.into()).unwrap();
        let err = decode_cxa(&bytes[..bytes.len() - 1]).unwrap_err();
        assert!(matches!(err, Error::Truncated { expected: 30, found: 29 }));
    }

    #[test]
    fn unknown_dtype_is_rejected() {
        let a = MaskArray::new(vec![1], vec![1]).unwrap();
        let mut bytes = encode_cxa(&a.into()).unwrap();
        bytes[4] = 9;
        assert!(matches!(decode_cxa(&bytes), Err(Error::UnknownDtype(9))));
    }

    #[test]
    fn writer_rejects_nan_reader_flags_it() {
        let a = RealArray::new(vec![3], vec![0.0, f32::NAN, 1.0]).unwrap();
        assert!(matches!(
            encode_cxa(&a.clone().into()),
            Err(Error::NonFinite { index: 1 })
        ));
        // hand-assemble a file containing NaN to exercise the reader path
        let mut bytes = encode_cxa(&RealArray::new(vec![3], vec![0.0; 3]).unwrap().into()).unwrap();
        let off = bytes.len() - 8;
        bytes[off..off + 4].copy_from_slice(&f32::INFINITY.to_le_bytes());
        let read = decode_cxa(&bytes).unwrap();
        assert_eq!(read.non_finite, Some(1));
    }

    #[test]
    fn mask_with_value_two_fails_on_read() {
        let mut bytes = encode_cxa(&MaskArray::new(vec![2], vec![0, 1]).unwrap().into()).unwrap();
        *bytes.last_mut().unwrap() = 2;
        assert!(matches!(decode_cxa(&bytes), Err(Error::Invariant(_))));
    }
}
