//! k-t undersampling patterns: Cartesian uniform, Cartesian Gaussian and
//! golden-angle pseudo-radial, all with a fully sampled calibration block.

use std::ops::Range;

use ndarray::{s, Array2, Array3, Array4, Axis, Zip};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_io::MaskArray;
use crate::util::seeded_rng;

pub const DEFAULT_ACS_LINES: usize = 16;
pub const GOLDEN_ANGLE_DEG: f64 = 111.246117975;
pub const MAX_AF: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Uniform,
    Gaussian,
    Radial,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Uniform, Pattern::Gaussian, Pattern::Radial];

    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::Uniform => "uniform",
            Pattern::Gaussian => "gaussian",
            Pattern::Radial => "radial",
        }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Pattern::Uniform),
            "gaussian" => Ok(Pattern::Gaussian),
            "radial" => Ok(Pattern::Radial),
            other => Err(Error::InvalidParameter(format!("unknown pattern {other:?}"))),
        }
    }
}

/// Rows `[ky/2 - acs/2, ky/2 - acs/2 + acs)`; the DC row `ky/2` is always inside.
pub fn acs_range(ky: usize, acs_lines: usize) -> Range<usize> {
    let start = (ky / 2).saturating_sub(acs_lines / 2);
    start..(start + acs_lines).min(ky)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    pub pattern: Pattern,
    pub af_nominal: u32,
    pub frames: usize,
    pub ky: usize,
    pub kx: usize,
    pub acs_lines: usize,
    pub seed: u64,
}

impl MaskSpec {
    pub fn new(pattern: Pattern, af_nominal: u32, frames: usize, ky: usize, kx: usize) -> Self {
        Self {
            pattern,
            af_nominal,
            frames,
            ky,
            kx,
            acs_lines: DEFAULT_ACS_LINES,
            seed: 0,
        }
    }

    pub fn with_acs(mut self, acs_lines: usize) -> Self {
        self.acs_lines = acs_lines;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        // af 1 is accepted as the fully sampled reference pattern
        if !(1..=MAX_AF).contains(&self.af_nominal) {
            return Err(Error::InvalidParameter(format!(
                "af_nominal {} outside 1..={MAX_AF}",
                self.af_nominal
            )));
        }
        if self.frames == 0 || self.ky == 0 || self.kx == 0 {
            return Err(Error::InvalidParameter("frames, ky and kx must be positive".into()));
        }
        if self.ky < self.acs_lines {
            return Err(Error::InvalidParameter(format!(
                "ky {} is smaller than acs_lines {}",
                self.ky, self.acs_lines
            )));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<SamplingMask> {
        match self.pattern {
            Pattern::Uniform => make_uniform_kt(self),
            Pattern::Gaussian => make_gaussian_kt(self),
            Pattern::Radial => make_radial_kt(self),
        }
    }
}

/// Line masks are stored as `frames x ky` and broadcast along kx; radial
/// masks are full `frames x ky x kx` grids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskData {
    Lines(Array2<bool>),
    Grid(Array3<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    pub data: MaskData,
    pub pattern: Pattern,
    pub af_nominal: u32,
    pub acs_lines: usize,
    pub seed: u64,
    pub kx: usize,
    pub af_realized: f64,
    pub af_realized_per_frame: Vec<f64>,
}

/// Sidecar metadata written next to every serialized mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSidecar {
    pub pattern: Pattern,
    pub af_nominal: u32,
    pub af_realized: f64,
    pub acs_lines: usize,
    pub seed: u64,
    pub frames: usize,
    pub ky: usize,
    pub kx: usize,
}

fn realized(counts: &[usize], per_frame_total: usize) -> (f64, Vec<f64>) {
    let total: usize = counts.iter().sum();
    let overall = (per_frame_total * counts.len()) as f64 / total as f64;
    let per = counts
        .iter()
        .map(|&c| per_frame_total as f64 / c as f64)
        .collect();
    (overall, per)
}

impl SamplingMask {
    fn from_data(data: MaskData, spec: &MaskSpec) -> Result<Self> {
        let (counts, per_frame_total) = match &data {
            MaskData::Lines(l) => (
                l.axis_iter(Axis(0))
                    .map(|f| f.iter().filter(|&&b| b).count())
                    .collect::<Vec<_>>(),
                l.dim().1,
            ),
            MaskData::Grid(g) => (
                g.axis_iter(Axis(0))
                    .map(|f| f.iter().filter(|&&b| b).count())
                    .collect::<Vec<_>>(),
                g.dim().1 * g.dim().2,
            ),
        };
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::InvalidParameter("a frame has no sampled entries".into()));
        }
        let (af_realized, af_realized_per_frame) = realized(&counts, per_frame_total);
        if spec.af_nominal > 1 && af_realized <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "af {} is fully sampled with {} ACS lines on ky={}; reduce acs_lines",
                spec.af_nominal, spec.acs_lines, spec.ky
            )));
        }
        Ok(Self {
            data,
            pattern: spec.pattern,
            af_nominal: spec.af_nominal,
            acs_lines: spec.acs_lines,
            seed: spec.seed,
            kx: spec.kx,
            af_realized,
            af_realized_per_frame,
        })
    }

    pub fn frames(&self) -> usize {
        match &self.data {
            MaskData::Lines(l) => l.dim().0,
            MaskData::Grid(g) => g.dim().0,
        }
    }

    pub fn ky(&self) -> usize {
        match &self.data {
            MaskData::Lines(l) => l.dim().1,
            MaskData::Grid(g) => g.dim().1,
        }
    }

    /// Expanded `frames x ky x kx` boolean grid.
    pub fn to_grid(&self) -> Array3<bool> {
        match &self.data {
            MaskData::Lines(l) => {
                let (frames, ky) = l.dim();
                Array3::from_shape_fn((frames, ky, self.kx), |(t, k, _)| l[[t, k]])
            }
            MaskData::Grid(g) => g.clone(),
        }
    }

    pub fn to_mask_array(&self) -> MaskArray {
        let (dims, data) = match &self.data {
            MaskData::Lines(l) => (vec![l.dim().0, l.dim().1], l.iter().map(|&b| b as u8).collect()),
            MaskData::Grid(g) => (
                vec![g.dim().0, g.dim().1, g.dim().2],
                g.iter().map(|&b| b as u8).collect(),
            ),
        };
        MaskArray::new(dims, data).expect("mask data is binary and sized")
    }

    pub fn sidecar(&self) -> MaskSidecar {
        MaskSidecar {
            pattern: self.pattern,
            af_nominal: self.af_nominal,
            af_realized: self.af_realized,
            acs_lines: self.acs_lines,
            seed: self.seed,
            frames: self.frames(),
            ky: self.ky(),
            kx: self.kx,
        }
    }

    /// Rebuild a mask from its serialized array and sidecar. The realized AF
    /// is recounted from the data, not trusted from the sidecar.
    pub fn from_parts(array: &MaskArray, sidecar: &MaskSidecar) -> Result<Self> {
        let dims = array.dims();
        let bools: Vec<bool> = array.data().iter().map(|&b| b == 1).collect();
        let data = match dims.len() {
            2 => MaskData::Lines(
                Array2::from_shape_vec((dims[0], dims[1]), bools)
                    .map_err(|e| Error::ExtentMismatch(e.to_string()))?,
            ),
            3 => {
                if dims[2] != sidecar.kx {
                    return Err(Error::ExtentMismatch(format!(
                        "mask kx {} vs sidecar kx {}",
                        dims[2], sidecar.kx
                    )));
                }
                MaskData::Grid(
                    Array3::from_shape_vec((dims[0], dims[1], dims[2]), bools)
                        .map_err(|e| Error::ExtentMismatch(e.to_string()))?,
                )
            }
            n => return Err(Error::ExtentMismatch(format!("mask must be 2-D or 3-D, got {n}-D"))),
        };
        let spec = MaskSpec {
            pattern: sidecar.pattern,
            af_nominal: sidecar.af_nominal,
            frames: dims[0],
            ky: dims[1],
            kx: sidecar.kx,
            acs_lines: sidecar.acs_lines,
            seed: sidecar.seed,
        };
        SamplingMask::from_data(data, &spec)
    }
}

pub fn make_uniform_kt(spec: &MaskSpec) -> Result<SamplingMask> {
    spec.validate()?;
    let af = spec.af_nominal as usize;
    let acs = acs_range(spec.ky, spec.acs_lines);
    let lines = Array2::from_shape_fn((spec.frames, spec.ky), |(t, k)| {
        acs.contains(&k) || k % af == t % af
    });
    SamplingMask::from_data(MaskData::Lines(lines), spec)
}

/// Per-frame line budget of the Gaussian pattern: `round(ky / af)`.
pub fn gaussian_line_budget(ky: usize, af: u32) -> usize {
    (ky as f64 / af as f64).round() as usize
}

pub fn make_gaussian_kt(spec: &MaskSpec) -> Result<SamplingMask> {
    spec.validate()?;
    let budget = gaussian_line_budget(spec.ky, spec.af_nominal);
    if budget < spec.acs_lines {
        return Err(Error::InvalidParameter(format!(
            "round(ky/af) = {budget} lines is below acs_lines {}; use a smaller af or fewer ACS lines",
            spec.acs_lines
        )));
    }
    let acs = acs_range(spec.ky, spec.acs_lines);
    let sigma = spec.ky as f64 / 6.0;
    let center = (spec.ky / 2) as f64;
    let candidates: Vec<usize> = (0..spec.ky).filter(|k| !acs.contains(k)).collect();
    let weights: Vec<f64> = candidates
        .iter()
        .map(|&k| {
            let d = k as f64 - center;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let draws = budget - acs.len();

    let mut rng = seeded_rng(spec.seed);
    let mut lines = Array2::from_elem((spec.frames, spec.ky), false);
    for mut frame in lines.axis_iter_mut(Axis(0)) {
        for k in acs.clone() {
            frame[k] = true;
        }
        let mut w = weights.clone();
        let mut remaining: f64 = w.iter().sum();
        for _ in 0..draws {
            let u = rng.random::<f64>() * remaining;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &wi) in w.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                acc += wi;
                pick = Some(i);
                if u < acc {
                    break;
                }
            }
            let i = pick.expect("enough candidates for the line budget");
            frame[candidates[i]] = true;
            remaining -= w[i];
            w[i] = 0.0;
        }
    }
    SamplingMask::from_data(MaskData::Lines(lines), spec)
}

/// Angle (degrees, in [0, 180)) of spoke `s` in frame `t`.
pub fn spoke_angle_deg(frame: usize, spoke: usize) -> f64 {
    ((frame + spoke) as f64 * GOLDEN_ANGLE_DEG).rem_euclid(180.0)
}

/// Mark the grid samples nearest to a spoke through the matrix center,
/// stepping half a grid unit from `-R` to `R`, `R = max(ky, kx) / 2`.
/// Returns the number of newly set samples.
pub fn rasterize_spoke(frame: &mut ndarray::ArrayViewMut2<bool>, angle_deg: f64) -> usize {
    let (ky, kx) = frame.dim();
    let (cy, cx) = ((ky / 2) as f64, (kx / 2) as f64);
    let half_steps = ky.max(kx) as i64; // 2R / 0.5 / 2
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let mut added = 0;
    for j in -half_steps..=half_steps {
        let r = 0.5 * j as f64;
        let y = (cy + r * sin).round();
        let x = (cx + r * cos).round();
        if y < 0.0 || x < 0.0 || y >= ky as f64 || x >= kx as f64 {
            continue;
        }
        let cell = &mut frame[[y as usize, x as usize]];
        if !*cell {
            *cell = true;
            added += 1;
        }
    }
    added
}

fn radial_frame(spec: &MaskSpec, t: usize) -> (Array2<bool>, usize) {
    let per_frame = spec.ky * spec.kx;
    let target = ((per_frame as f64 / spec.af_nominal as f64).round() as usize).max(1);
    let mut frame = Array2::from_elem((spec.ky, spec.kx), false);
    let mut count = 0;
    let max_spokes = 100 * spec.ky.max(spec.kx);
    let mut spokes = 0;
    while count < target && spokes < max_spokes {
        count += rasterize_spoke(&mut frame.view_mut(), spoke_angle_deg(t, spokes));
        spokes += 1;
    }
    frame
        .slice_mut(s![acs_range(spec.ky, spec.acs_lines), ..])
        .fill(true);
    (frame, spokes)
}

/// Golden-angle pseudo-radial pattern on the Cartesian grid.
///
/// Each frame draws spokes at angles `(t + s) * golden_angle` until the
/// spokes alone cover at least `round(ky * kx / af)` samples, then adds the
/// calibration block, the same way the uniform pattern adds it on top of
/// its `ky / af` lines.
pub fn make_radial_kt(spec: &MaskSpec) -> Result<SamplingMask> {
    spec.validate()?;
    let mut grid = Array3::from_elem((spec.frames, spec.ky, spec.kx), false);
    for (t, mut frame) in grid.axis_iter_mut(Axis(0)).enumerate() {
        frame.assign(&radial_frame(spec, t).0);
    }
    SamplingMask::from_data(MaskData::Grid(grid), spec)
}

/// Number of spokes the radial generator places in each frame.
pub fn radial_spoke_counts(spec: &MaskSpec) -> Result<Vec<usize>> {
    spec.validate()?;
    Ok((0..spec.frames).map(|t| radial_frame(spec, t).1).collect())
}

/// Zero every k-space sample the mask does not keep (broadcast over coils).
pub fn apply_mask(y: &Array4<Complex64>, mask: &SamplingMask) -> Result<Array4<Complex64>> {
    let (_, frames, ky, kx) = y.dim();
    if (mask.frames(), mask.ky(), mask.kx) != (frames, ky, kx) {
        return Err(Error::ExtentMismatch(format!(
            "mask {:?} vs k-space frames/ky/kx {:?}",
            (mask.frames(), mask.ky(), mask.kx),
            (frames, ky, kx)
        )));
    }
    let grid = mask.to_grid();
    let mut out = y.clone();
    for mut coil in out.axis_iter_mut(Axis(0)) {
        Zip::from(&mut coil).and(&grid).for_each(|v, &m| {
            if !m {
                *v = Complex64::default();
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_line_count_example() {
        let m = make_uniform_kt(&MaskSpec::new(Pattern::Uniform, 4, 1, 32, 8).with_acs(8)).unwrap();
        let MaskData::Lines(l) = &m.data else { panic!() };
        assert_eq!(l.iter().filter(|&&b| b).count(), 14);
        assert!((m.af_realized - 32.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_af1_is_full() {
        let m = make_uniform_kt(&MaskSpec::new(Pattern::Uniform, 1, 3, 32, 8)).unwrap();
        assert_eq!(m.af_realized, 1.0);
    }

    #[test]
    fn uniform_offsets_cover_all_lines() {
        let spec = MaskSpec::new(Pattern::Uniform, 6, 6, 48, 4);
        let m = make_uniform_kt(&spec).unwrap();
        let MaskData::Lines(l) = &m.data else { panic!() };
        for k in 0..48 {
            assert!((0..6).any(|t| l[[t, k]]), "line {k} never sampled");
        }
    }

    #[test]
    fn uniform_ignores_seed() {
        let a = make_uniform_kt(&MaskSpec::new(Pattern::Uniform, 8, 4, 64, 8).with_seed(1)).unwrap();
        let b = make_uniform_kt(&MaskSpec::new(Pattern::Uniform, 8, 4, 64, 8).with_seed(2)).unwrap();
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn gaussian_budget_too_small_errors() {
        let spec = MaskSpec::new(Pattern::Gaussian, 24, 1, 192, 8);
        assert!(matches!(make_gaussian_kt(&spec), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gaussian_seed_behaviour() {
        let spec = MaskSpec::new(Pattern::Gaussian, 4, 4, 128, 8).with_seed(5);
        let a = make_gaussian_kt(&spec).unwrap();
        let b = make_gaussian_kt(&spec).unwrap();
        let c = make_gaussian_kt(&spec.clone().with_seed(6)).unwrap();
        assert_eq!(a.data, b.data);
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn radial_center_always_sampled_and_rotation() {
        let spec = MaskSpec::new(Pattern::Radial, 8, 5, 64, 48).with_acs(8);
        let m = make_radial_kt(&spec).unwrap();
        let g = m.to_grid();
        for t in 0..5 {
            assert!(g[[t, 32, 24]]);
        }
        for s in 0..10 {
            let shifted = (spoke_angle_deg(0, s) + GOLDEN_ANGLE_DEG).rem_euclid(180.0);
            assert!((spoke_angle_deg(1, s) - shifted).abs() < 1e-9);
        }
    }

    #[test]
    fn single_spoke_through_center_has_expected_extent() {
        let mut f = Array2::from_elem((16, 16), false);
        let n = rasterize_spoke(&mut f.view_mut(), 0.0);
        // horizontal spoke covers the whole center row
        assert_eq!(n, 16);
        assert!(f.row(8).iter().all(|&b| b));
    }

    #[test]
    fn apply_mask_rejects_wrong_extent() {
        let m = make_uniform_kt(&MaskSpec::new(Pattern::Uniform, 4, 2, 32, 8)).unwrap();
        assert!(apply_mask(&Array4::zeros((1, 2, 32, 6)), &m).is_err());
    }
}
