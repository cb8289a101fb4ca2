mod common;

use kspace_bench::operators::{estimate_csm, EncodingOperator};
use kspace_bench::phantom::coil_profiles;
use kspace_bench::sampling::{apply_mask, MaskSpec, Pattern};
use kspace_bench::util::inner;
use ndarray::Array3;
use num_complex::Complex64;

#[test]
fn normal_operator_is_positive_semidefinite() {
    let mut rng = common::rng(3);
    let mask = MaskSpec::new(Pattern::Radial, 6, 3, 48, 40).with_acs(8).generate().unwrap();
    let op = EncodingOperator::new(coil_profiles(4, 48, 40, 2), mask.to_grid()).unwrap();
    for _ in 0..10 {
        let x = common::random_image(&mut rng, (3, 48, 40));
        assert!(inner(&x, &op.normal(&x).unwrap()).re >= 0.0);
    }
}

#[test]
fn masked_out_samples_never_reach_the_adjoint() {
    let mut rng = common::rng(4);
    let mask = MaskSpec::new(Pattern::Uniform, 4, 2, 32, 32).with_acs(8).generate().unwrap();
    let op = EncodingOperator::new(coil_profiles(3, 32, 32, 1), mask.to_grid()).unwrap();
    let y = common::random_kspace(&mut rng, (3, 2, 32, 32));
    let zeroed = apply_mask(&y, &mask).unwrap();
    let a = op.adjoint(&y).unwrap();
    let b = op.adjoint(&zeroed).unwrap();
    assert!(a.iter().zip(b.iter()).all(|(p, q)| (p - q).norm() < 1e-12));
}

#[test]
fn single_unit_coil_full_mask_is_plain_fft() {
    let mut rng = common::rng(5);
    let maps = Array3::from_elem((1, 32, 24), Complex64::new(1.0, 0.0));
    let op = EncodingOperator::new(maps, Array3::from_elem((2, 32, 24), true)).unwrap();
    let x = common::random_image(&mut rng, (2, 32, 24));
    let k = op.apply(&x).unwrap();
    for t in 0..2 {
        let f = kspace_bench::operators::fft2c(&x.index_axis(ndarray::Axis(0), t).to_owned());
        let d: f64 = f.iter().zip(k.index_axis(ndarray::Axis(0), 0).index_axis(ndarray::Axis(0), t).iter()).map(|(a, b)| (a - b).norm()).sum();
        assert!(d < 1e-10);
    }
    let back = op.normal(&x).unwrap();
    assert!(back.iter().zip(x.iter()).all(|(a, b)| (a - b).norm() < 1e-10));
    assert!(op.apply(&Array3::zeros((2, 32, 24))).unwrap().iter().all(|v| v.norm() == 0.0));
}

/// Coil maps estimated from the calibration block against the phantom's
/// own smooth profiles, compared after removing the common phase.
#[test]
fn csm_estimate_matches_true_profiles() {
    let c = common::case(128, 104, 6, 8, 2, Pattern::Uniform, 4, 16);
    let est = estimate_csm(&c.y, 16).unwrap();
    let truth = &c.phantom.coils;
    let mut err = 0.0;
    let mut n = 0usize;
    for i in 0..128 {
        for j in 0..104 {
            if !est.support[[i, j]] {
                continue;
            }
            let phase_est = inner(&est.maps.slice(ndarray::s![.., i, j]), &truth.slice(ndarray::s![.., i, j]));
            let rot = if phase_est.norm() > 0.0 { phase_est / phase_est.norm() } else { Complex64::new(1.0, 0.0) };
            for ch in 0..8 {
                err += (est.maps[[ch, i, j]] * rot - truth[[ch, i, j]]).norm();
                n += 1;
            }
        }
    }
    let mae = err / n as f64;
    println!("csm mean absolute error {mae:.4} over {} support samples", n / 8);
    assert!(mae < 0.05, "{mae}");
}

#[test]
fn single_coil_maps_are_one_on_support() {
    let c = common::case(64, 64, 3, 1, 1, Pattern::Uniform, 4, 16);
    let est = estimate_csm(&c.y, 16).unwrap();
    let on: Vec<f64> = est
        .maps
        .index_axis(ndarray::Axis(0), 0)
        .iter()
        .zip(est.support.iter())
        .filter(|(_, &s)| s)
        .map(|(v, _)| v.norm())
        .collect();
    assert!(!on.is_empty());
    assert!(on.iter().all(|v| (v - 1.0).abs() < 1e-9));
}
