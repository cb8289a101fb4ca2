//! k-t undersampling masks: uniform, variable-density Gaussian and
//! golden-angle pseudo-radial.
//!
//! Usage: cargo run --example sampling_masks

use kspace_bench::sampling::{gaussian_line_budget, radial_spoke_counts, MaskSpec, Pattern};

fn show_frame(grid: &ndarray::Array3<bool>, t: usize) {
    let (_, ky, kx) = grid.dim();
    for y in (0..ky).step_by(4) {
        let row: String = (0..kx).step_by(2).map(|x| if grid[[t, y, x]] { '#' } else { '.' }).collect();
        println!("    {row}");
    }
}

fn main() -> kspace_bench::Result<()> {
    let (frames, ky, kx) = (8, 192, 156);
    for pattern in Pattern::ALL {
        for af in [4, 8, 16, 24] {
            let spec = MaskSpec::new(pattern, af, frames, ky, kx).with_acs(8).with_seed(3);
            let m = spec.generate()?;
            let extra = match pattern {
                Pattern::Gaussian => format!("{} lines/frame", gaussian_line_budget(ky, af)),
                Pattern::Radial => format!("spokes {:?}", radial_spoke_counts(&spec)?),
                Pattern::Uniform => String::new(),
            };
            println!("{pattern:8} af{af:<2} realized {:5.2} {extra}", m.af_realized);
        }
    }

    let small = MaskSpec::new(Pattern::Radial, 8, 2, 64, 64).with_acs(8).generate()?;
    for t in 0..2 {
        println!("radial frame {t}:");
        show_frame(&small.to_grid(), t);
    }
    Ok(())
}
