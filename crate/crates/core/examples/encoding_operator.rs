//! The multi-coil encoding operator E = M F S and its adjoint.
//!
//! Usage: cargo run --example encoding_operator

use kspace_bench::operators::{estimate_csm, fft2c, ifft2c, EncodingOperator};
use kspace_bench::phantom::{coil_profiles, generate_phantom, phantom_to_kspace, PhantomSpec};
use kspace_bench::sampling::{apply_mask, MaskSpec, Pattern};
use kspace_bench::util::{inner, norm};
use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

fn main() -> kspace_bench::Result<()> {
    let (coils, frames, ky, kx) = (4, 3, 64, 48);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let noise = |rng: &mut rand_chacha::ChaCha8Rng, d: (usize, usize, usize)| {
        Array3::from_shape_simple_fn(d, || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    };

    let img: Array2<Complex64> = noise(&mut rng, (1, ky, kx)).index_axis_move(ndarray::Axis(0), 0);
    let back = ifft2c(&fft2c(&img));
    println!("fft round trip error {:.2e}", norm(&(&back - &img)));

    let maps = coil_profiles(coils, ky, kx, 1);
    let mask = MaskSpec::new(Pattern::Gaussian, 4, frames, ky, kx).with_seed(2).generate()?;
    let op = EncodingOperator::new(maps, mask.to_grid())?;

    // <E x, y> == <x, E^H y>
    let x = noise(&mut rng, (frames, ky, kx));
    let y = op.apply(&x)?;
    let r = ndarray::Array4::from_shape_simple_fn(y.dim(), || Complex64::new(rng.random::<f64>(), rng.random::<f64>()))
        * &op.apply(&Array3::from_elem(x.dim(), Complex64::new(1.0, 0.0)))?.mapv(|v| Complex64::new(f64::from(v != Complex64::ZERO), 0.0));
    let lhs = inner(&y, &r);
    let rhs = inner(&x, &op.adjoint(&r)?);
    println!("adjoint test |<Ex,y> - <x,E'y>| / |<Ex,y>| = {:.2e}", (lhs - rhs).norm() / lhs.norm());

    // coil maps from the calibration block of undersampled data
    let ph = generate_phantom(&PhantomSpec { ky, kx, frames, coils, ..Default::default() })?;
    let full = phantom_to_kspace(&ph.image, &ph.coils)?;
    let under = apply_mask(&full, &mask)?;
    let est = estimate_csm(&under, 16)?;
    let mut err = 0.0;
    let mut n = 0usize;
    for ((c, i, j), v) in est.maps.indexed_iter() {
        if est.support[[i, j]] {
            // compare up to the common phase of coil 0
            let p = ph.coils[[0, i, j]] / ph.coils[[0, i, j]].norm();
            let e = est.maps[[0, i, j]] / est.maps[[0, i, j]].norm();
            err += (v * e.conj() - ph.coils[[c, i, j]] * p.conj()).norm();
            n += 1;
        }
    }
    println!("estimated maps: mean abs error {:.4} over {} support samples", err / n as f64, n);
    Ok(())
}
