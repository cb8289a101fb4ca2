#![allow(dead_code)]

use kspace_bench::phantom::{generate_phantom, phantom_to_kspace, Modality, Phantom, PhantomSpec};
use kspace_bench::sampling::{apply_mask, MaskSpec, Pattern, SamplingMask};
use ndarray::{Array3, Array4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub phantom: Phantom,
    pub full: Array4<Complex64>,
    pub mask: SamplingMask,
    pub y: Array4<Complex64>,
}

pub fn phantom(ky: usize, kx: usize, frames: usize, coils: usize, seed: u64) -> Phantom {
    generate_phantom(&PhantomSpec {
        ky,
        kx,
        frames,
        coils,
        modality: Modality::ALL[seed as usize % Modality::ALL.len()],
        seed,
        contraction_amplitude: 0.2,
    })
    .unwrap()
}

pub fn case(ky: usize, kx: usize, frames: usize, coils: usize, seed: u64, pattern: Pattern, af: u32, acs: usize) -> Case {
    let phantom = phantom(ky, kx, frames, coils, seed);
    let full = phantom_to_kspace(&phantom.image, &phantom.coils).unwrap();
    let mask = MaskSpec::new(pattern, af, frames, ky, kx)
        .with_acs(acs)
        .with_seed(seed + 1000)
        .generate()
        .unwrap();
    let y = apply_mask(&full, &mask).unwrap();
    Case { phantom, full, mask, y }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, dim: (usize, usize, usize)) -> Array3<Complex64> {
    Array3::from_shape_simple_fn(dim, || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

pub fn random_kspace(rng: &mut ChaCha8Rng, dim: (usize, usize, usize, usize)) -> Array4<Complex64> {
    Array4::from_shape_simple_fn(dim, || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
