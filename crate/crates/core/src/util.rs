//! Small shared helpers: the seeded generator and complex vector algebra.

use ndarray::{ArrayBase, Data, DataMut, Dimension, Zip};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identity of the pseudo-random generator, recorded in run manifests.
pub const GENERATOR_ID: &str = "ChaCha8Rng (rand_chacha 0.9, seeded via seed_from_u64)";

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed)
}

/// SplitMix64 finalizer; derives independent sub-seeds from a base seed.
pub fn mix_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `<a, b> = sum conj(a) * b`
pub fn inner<S1, S2, D>(a: &ArrayBase<S1, D>, b: &ArrayBase<S2, D>) -> Complex64
where
    S1: Data<Elem = Complex64>,
    S2: Data<Elem = Complex64>,
    D: Dimension,
{
    Zip::from(a)
        .and(b)
        .fold(Complex64::default(), |acc, x, y| acc + x.conj() * y)
}

pub fn norm_sqr<S, D>(a: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = Complex64>,
    D: Dimension,
{
    a.iter().map(|c| c.norm_sqr()).sum()
}

pub fn norm<S, D>(a: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = Complex64>,
    D: Dimension,
{
    norm_sqr(a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<S1, S2, D>(y: &mut ArrayBase<S1, D>, alpha: Complex64, x: &ArrayBase<S2, D>)
where
    S1: DataMut<Elem = Complex64>,
    S2: Data<Elem = Complex64>,
    D: Dimension,
{
    Zip::from(y).and(x).for_each(|y, &x| *y += alpha * x);
}

pub fn has_non_finite<S, D>(a: &ArrayBase<S, D>) -> bool
where
    S: Data<Elem = Complex64>,
    D: Dimension,
{
    a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite())
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}
