//! Time zero-fill, CG-SENSE and ADMM-TV on a few undersampled cases,
//! including file I/O.
//!
//! Usage: cargo run --release --example bench_solvers

use kspace_bench::bench::{bench_recon, records_csv, summarize, summary_csv, BenchCase};
use kspace_bench::phantom::{generate_phantom, phantom_to_kspace, PhantomSpec};
use kspace_bench::recon::{Method, ReconConfig};
use kspace_bench::sampling::{apply_mask, MaskSpec, Pattern};
use kspace_bench::tensor_io::{write_cxa, ComplexArray};

fn main() -> kspace_bench::Result<()> {
    let root = std::env::temp_dir().join("kspace_bench_bench_example");
    let mut cases = Vec::new();
    for seed in 0..3 {
        let spec = PhantomSpec { ky: 64, kx: 64, frames: 6, coils: 4, seed, ..Default::default() };
        let ph = generate_phantom(&spec)?;
        let mask = MaskSpec::new(Pattern::Uniform, 4, spec.frames, spec.ky, spec.kx).generate()?;
        let y = apply_mask(&phantom_to_kspace(&ph.image, &ph.coils)?, &mask)?;
        let dir = root.join(format!("case{seed}"));
        std::fs::create_dir_all(&dir).expect("case dir");
        write_cxa(&ComplexArray::from_c64(&y).into(), dir.join("kspace.cxa"))?;
        write_cxa(&mask.to_mask_array().into(), dir.join("mask.cxa"))?;
        std::fs::write(dir.join("mask.json"), serde_json::to_string(&mask.sidecar())?).expect("sidecar");
        cases.push(BenchCase { case_id: format!("case{seed}"), dir });
    }

    let mut records = Vec::new();
    for method in [Method::Zf, Method::Cgsense, Method::AdmmTv] {
        records.extend(bench_recon(&cases, &ReconConfig::for_method(method), 3, false, &root.join("out"))?);
    }
    print!("{}", records_csv(&records)?);
    println!();
    print!("{}", summary_csv(&summarize(&records))?);
    Ok(())
}
