mod common;

use kspace_bench::evaluation::{aggregate_modality, compute_nmse, compute_psnr, compute_ssim, weight_cell};
use kspace_bench::phantom::Modality;
use kspace_bench::sampling::Pattern;
use kspace_bench::tensor_io::{parse_metrics_jsonl, CaseMetrics, FailureReason};
use ndarray::Array3;
use proptest::prelude::*;
use rand::Rng;

fn record(i: usize, valid: bool, ssim: f64) -> CaseMetrics {
    if valid {
        CaseMetrics {
            team: "t".into(),
            case_id: format!("c{i}"),
            modality: Modality::T1Map,
            pattern: Pattern::Radial,
            af: 8,
            ssim: Some(ssim),
            psnr_db: Some(30.0 * ssim),
            nmse: Some(1.0 - ssim),
            valid: true,
            failure_reason: None,
        }
    } else {
        CaseMetrics::failed("t", &format!("c{i}"), Modality::T1Map, Pattern::Radial, 8, FailureReason::NonFinite)
    }
}

#[test]
fn metric_identities() {
    let mut rng = common::rng(1);
    let a = Array3::from_shape_simple_fn((3, 24, 24), || rng.random::<f64>());
    assert_eq!(compute_nmse(&a, &a).unwrap(), 0.0);
    assert!((compute_ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(compute_psnr(&a, &a).unwrap(), 300.0);
    assert_eq!(compute_nmse(&Array3::zeros(a.dim()), &a).unwrap(), 1.0);
}

#[test]
fn psnr_falls_as_noise_grows() {
    let mut rng = common::rng(2);
    let a = Array3::from_shape_simple_fn((2, 32, 32), || rng.random::<f64>());
    let noise = Array3::from_shape_simple_fn(a.dim(), || rng.random::<f64>() - 0.5);
    let p: Vec<f64> = [0.01, 0.05, 0.2].iter().map(|s| compute_psnr(&(&a + &(&noise * *s)), &a).unwrap()).collect();
    assert!(p[0] > p[1] && p[1] > p[2], "{p:?}");
}

proptest! {
    #[test]
    fn weighting_follows_success_rate(
        ssims in prop::collection::vec(0.0f64..1.0, 1..15),
        fails in 0usize..10,
    ) {
        let mut recs: Vec<CaseMetrics> = ssims.iter().enumerate().map(|(i, &s)| record(i, true, s)).collect();
        recs.extend((0..fails).map(|i| record(100 + i, false, 0.0)));
        let agg = aggregate_modality(&recs).unwrap();
        let w = ssims.len() as f64 / recs.len() as f64;
        let m = ssims.iter().sum::<f64>() / ssims.len() as f64;
        let nm = ssims.iter().map(|s| 1.0 - s).sum::<f64>() / ssims.len() as f64;
        prop_assert!((agg.w - w).abs() < 1e-12);
        prop_assert!((agg.ssim_adj - w * m).abs() < 1e-12);
        let nadj = agg.nmse_adj.unwrap();
        prop_assert!((nadj - (2.0 - w) * nm).abs() < 1e-12);
        prop_assert!(nadj >= nm - 1e-12 && nadj <= 2.0 * nm + 1e-12);
    }

    #[test]
    fn weight_cell_rejects_impossible_counts(n in 0usize..20, total in 0usize..20) {
        let r = weight_cell(n, total, Some(0.5), Some(20.0), Some(0.1));
        prop_assert_eq!(r.is_ok(), total > 0 && n <= total);
    }

    #[test]
    fn metrics_jsonl_roundtrip(ssims in prop::collection::vec(0.0f64..1.0, 0..6), fails in 0usize..3) {
        let mut recs: Vec<CaseMetrics> = ssims.iter().enumerate().map(|(i, &s)| record(i, true, s)).collect();
        recs.extend((0..fails).map(|i| record(50 + i, false, 0.0)));
        let text: String = recs.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
        prop_assert_eq!(parse_metrics_jsonl(&text).unwrap(), recs);
    }
}
