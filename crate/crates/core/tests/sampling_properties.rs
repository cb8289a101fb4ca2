mod common;

use kspace_bench::sampling::{acs_range, apply_mask, spoke_angle_deg, MaskSpec, Pattern, GOLDEN_ANGLE_DEG};
use kspace_bench::tensor_io::MaskArray;
use kspace_bench::util::norm_sqr;
use ndarray::Axis;
use proptest::prelude::*;

#[test]
fn acs_block_is_sampled_in_every_frame() {
    for pattern in Pattern::ALL {
        for af in [4, 8] {
            let m = MaskSpec::new(pattern, af, 6, 96, 64).with_acs(8).with_seed(3).generate().unwrap();
            let g = m.to_grid();
            for t in 0..6 {
                for k in acs_range(96, 8) {
                    assert!(g.index_axis(Axis(0), t).row(k).iter().all(|&b| b), "{pattern} af{af} t{t} k{k}");
                }
            }
        }
    }
}

#[test]
fn realized_af_matches_independent_recount() {
    for pattern in Pattern::ALL {
        let m = MaskSpec::new(pattern, 6, 5, 120, 90).with_acs(8).with_seed(1).generate().unwrap();
        let arr: MaskArray = m.to_mask_array();
        let ones = arr.data().iter().filter(|&&v| v == 1).count();
        let recount = arr.data().len() as f64 / ones as f64;
        assert_eq!(m.af_realized, recount, "{pattern}");
    }
}

#[test]
fn seed_behaviour() {
    let gen = |p, s| MaskSpec::new(p, 4, 4, 96, 64).with_seed(s).generate().unwrap().to_grid();
    assert_eq!(gen(Pattern::Uniform, 1), gen(Pattern::Uniform, 2));
    assert_eq!(gen(Pattern::Gaussian, 5), gen(Pattern::Gaussian, 5));
    assert_ne!(gen(Pattern::Gaussian, 5), gen(Pattern::Gaussian, 6));
    assert_eq!(gen(Pattern::Radial, 5), gen(Pattern::Radial, 5));
}

#[test]
fn radial_frames_rotate_by_the_golden_angle() {
    for t in 0..10 {
        for s in 0..5 {
            let d = (spoke_angle_deg(t + 1, s) - spoke_angle_deg(t, s)).rem_euclid(180.0);
            assert!((d - GOLDEN_ANGLE_DEG.rem_euclid(180.0)).abs() < 1e-9);
        }
    }
    let g = MaskSpec::new(Pattern::Radial, 12, 8, 64, 48).with_acs(0).generate().unwrap().to_grid();
    for t in 0..8 {
        assert!(g[[t, 32, 24]]);
    }
}

/// Sampled-line histogram of the Gaussian pattern against the Gaussian
/// density renormalized over the non-calibration lines.
#[test]
fn gaussian_density_matches_target_histogram() {
    let (ky, acs, af, frames) = (192, 16, 8, 10_000);
    let m = MaskSpec::new(Pattern::Gaussian, af, frames, ky, 8).with_acs(acs).with_seed(77).generate().unwrap();
    let g = m.to_grid();
    let block = acs_range(ky, acs);
    let sigma = ky as f64 / 6.0;
    let lines: Vec<usize> = (0..ky).filter(|k| !block.contains(k)).collect();
    let target: Vec<f64> = lines.iter().map(|&k| (-((k as f64 - 96.0).powi(2)) / (2.0 * sigma * sigma)).exp()).collect();
    let counts: Vec<f64> = lines
        .iter()
        .map(|&k| (0..frames).filter(|&t| g[[t, k, 0]]).count() as f64)
        .collect();
    let (ts, cs): (f64, f64) = (target.iter().sum(), counts.iter().sum());
    let mad: f64 = target.iter().zip(&counts).map(|(t, c)| (t / ts - c / cs).abs()).sum::<f64>() / lines.len() as f64;
    let rel = mad / (1.0 / lines.len() as f64);
    println!("gaussian histogram mean abs deviation relative to mean target: {rel:.4}");
    assert!(rel < 0.05, "{rel}");
    // unimodal and centered
    let peak = lines[counts.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
    assert!((peak as i64 - 96).unsigned_abs() as usize <= acs / 2 + 2, "peak at {peak}");
}

#[test]
fn gaussian_budget_is_exact_per_frame() {
    for af in [4, 6, 8, 12] {
        let m = MaskSpec::new(Pattern::Gaussian, af, 20, 192, 16).with_acs(16).with_seed(af as u64).generate().unwrap();
        let g = m.to_grid();
        for t in 0..20 {
            let n = (0..192).filter(|&k| g[[t, k, 0]]).count();
            assert_eq!(n, (192.0 / af as f64).round() as usize);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_mask_is_idempotent_and_contracting(seed in 0u64..1000, af in 2u32..10, p in 0usize..3) {
        let mut rng = common::rng(seed);
        let y = common::random_kspace(&mut rng, (2, 3, 48, 32));
        let m = MaskSpec::new(Pattern::ALL[p], af, 3, 48, 32).with_acs(4).with_seed(seed).generate().unwrap();
        let once = apply_mask(&y, &m).unwrap();
        let twice = apply_mask(&once, &m).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(norm_sqr(&once) <= norm_sqr(&y));
        let grid = m.to_grid();
        for ((_, t, i, j), v) in once.indexed_iter() {
            if !grid[[t, i, j]] {
                prop_assert_eq!(*v, num_complex::Complex64::new(0.0, 0.0));
            }
        }
    }
}
