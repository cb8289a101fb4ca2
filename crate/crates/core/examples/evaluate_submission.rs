//! Score a submission: metrics, failure handling and success-rate weighting.
//!
//! Usage: cargo run --example evaluate_submission

use kspace_bench::evaluation::{aggregate_cells, aggregate_overall, evaluate_case, feedback_report, CaseKey};
use kspace_bench::phantom::{generate_phantom, Modality, PhantomSpec};
use kspace_bench::sampling::Pattern;
use kspace_bench::tensor_io::{write_cxa, RealArray};
use rand::{Rng, SeedableRng};

fn main() -> kspace_bench::Result<()> {
    let dir = std::env::temp_dir().join("kspace_bench_eval_example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);

    let mut records = Vec::new();
    for case in 0..5 {
        let ph = generate_phantom(&PhantomSpec { ky: 64, kx: 64, frames: 4, coils: 1, seed: case, ..Default::default() })?;
        let reference = dir.join(format!("ref{case}.cxa"));
        write_cxa(&RealArray::from_f64(&ph.image).into(), &reference)?;

        let pred = dir.join(format!("pred{case}.cxa"));
        match case {
            // case 3 never gets submitted
            3 => {
                let _ = std::fs::remove_file(&pred);
            }
            // case 4 comes back with the wrong shape
            4 => write_cxa(&RealArray::new(vec![4, 32, 128], vec![0.0; 4 * 32 * 128])?.into(), &pred)?,
            _ => {
                let noisy = ph.image.mapv(|v| v + 0.05 * (rng.random::<f64>() - 0.5));
                write_cxa(&RealArray::from_f64(&noisy).into(), &pred)?;
            }
        }
        let key = CaseKey {
            team: "demo".into(),
            case_id: format!("P{case:03}"),
            modality: Modality::CineSax,
            pattern: Pattern::Uniform,
            af: 8,
        };
        records.push(evaluate_case(&key, &pred, &reference)?);
    }
    print!("{}", feedback_report(&records));

    let cells = aggregate_cells(&records)?;
    for c in &cells {
        println!(
            "weight {:.2}: ssim {:.4} -> {:.4}, nmse {:.5} -> {:?}",
            c.w, c.ssim_mean.unwrap_or(f64::NAN), c.ssim_adj, c.nmse_mean.unwrap_or(f64::NAN), c.nmse_adj
        );
    }
    let overall = aggregate_overall(&cells)?;
    println!("overall ssim_adj {:.4}", overall.ssim_adj);
    Ok(())
}
