//! Write and read back the three CXA array kinds.
//!
//! Usage: cargo run --example cxa_roundtrip

use kspace_bench::tensor_io::{decode_cxa, encode_cxa, read_cxa, write_cxa, ComplexArray, MaskArray, RealArray};
use num_complex::Complex32;

fn main() -> kspace_bench::Result<()> {
    let dir = std::env::temp_dir().join("kspace_bench_cxa_example");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let complex = ComplexArray::new(
        vec![2, 3],
        (0..6).map(|i| Complex32::new(i as f32, -(i as f32) / 2.0)).collect(),
    )?;
    let real = RealArray::new(vec![4], vec![0.5, 1.5, -2.0, 1e-7])?;
    let mask = MaskArray::new(vec![2, 2], vec![1, 0, 0, 1])?;

    for (name, array) in [("complex", complex.into()), ("real", real.into()), ("mask", mask.into())] {
        let path = dir.join(format!("{name}.cxa"));
        write_cxa(&array, &path)?;
        let back = read_cxa(&path)?;
        let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("{name:8} dims {:?} dtype {} -> {bytes} bytes, identical: {}", array.dims(), array.dtype_code(), back.array == array);
    }

    // the reader reports non-finite values instead of failing
    let mut bytes = encode_cxa(&RealArray::new(vec![2], vec![1.0, 2.0])?.into())?;
    let n = bytes.len();
    bytes[n - 4..].copy_from_slice(&f32::NAN.to_le_bytes());
    println!("flagged non-finite index: {:?}", decode_cxa(&bytes)?.non_finite);

    match decode_cxa(b"CXA2\x01\x00") {
        Err(e) => println!("bad header: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
