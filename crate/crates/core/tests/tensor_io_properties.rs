use kspace_bench::tensor_io::{decode_cxa, encode_cxa, read_cxa, write_cxa, ComplexArray, CxaArray, MaskArray, RealArray};
use kspace_bench::Error;
use num_complex::Complex32;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 1..5)
}

fn finite() -> impl Strategy<Value = f32> {
    prop::num::f32::NORMAL | prop::num::f32::SUBNORMAL | prop::num::f32::ZERO
}

fn array() -> impl Strategy<Value = CxaArray> {
    dims().prop_flat_map(|d| {
        let n: usize = d.iter().product();
        prop_oneof![
            prop::collection::vec((finite(), finite()), n)
                .prop_map({
                    let d = d.clone();
                    move |v| ComplexArray::new(d.clone(), v.into_iter().map(|(a, b)| Complex32::new(a, b)).collect()).unwrap().into()
                }),
            prop::collection::vec(finite(), n).prop_map({
                let d = d.clone();
                move |v| RealArray::new(d.clone(), v).unwrap().into()
            }),
            prop::collection::vec(0u8..2, n).prop_map(move |v| MaskArray::new(d.clone(), v).unwrap().into()),
        ]
    })
}

fn bits(a: &CxaArray) -> Vec<u32> {
    match a {
        CxaArray::Complex(c) => c.data().iter().flat_map(|v| [v.re.to_bits(), v.im.to_bits()]).collect(),
        CxaArray::Real(r) => r.data().iter().map(|v| v.to_bits()).collect(),
        CxaArray::Mask(m) => m.data().iter().map(|&v| v as u32).collect(),
    }
}

proptest! {
    #[test]
    fn roundtrip_is_bit_exact(a in array()) {
        let back = decode_cxa(&encode_cxa(&a).unwrap()).unwrap();
        prop_assert_eq!(back.non_finite, None);
        prop_assert_eq!(back.array.dims(), a.dims());
        prop_assert_eq!(back.array.dtype_code(), a.dtype_code());
        prop_assert_eq!(bits(&back.array), bits(&a));
    }

    #[test]
    fn any_truncation_is_detected(a in array(), cut in 1usize..8) {
        let bytes = encode_cxa(&a).unwrap();
        let cut = cut.min(bytes.len());
        let err = decode_cxa(&bytes[..bytes.len() - cut]).unwrap_err();
        let truncated = matches!(err, Error::Truncated { .. });
        prop_assert!(truncated, "{:?}", err);
    }
}

#[test]
fn file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let a: CxaArray = RealArray::new(vec![2, 2], vec![1.0, -0.0, f32::MIN_POSITIVE, 3.5]).unwrap().into();
    let p = dir.path().join("a.cxa");
    write_cxa(&a, &p).unwrap();
    assert_eq!(read_cxa(&p).unwrap().array, a);
    assert!(matches!(read_cxa(dir.path().join("missing.cxa")), Err(Error::Io { .. })));
}
