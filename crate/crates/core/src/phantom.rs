//! Deterministic dynamic cardiac-like phantom with a ring of surface coils.
//!
//! Geometry depends only on the seed; the modality tag only re-weights
//! tissue intensities, so the support is identical across modalities.

use std::f64::consts::PI;

use ndarray::{Array3, Array4, Axis};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::EncodingOperator;
use crate::util::{mix_seed, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    CineSax,
    CineLax,
    Tagging,
    T1Map,
    T2Map,
    Flow2d,
    Blackblood,
    AortaSag,
    AortaTra,
}

impl Modality {
    pub const ALL: [Modality; 9] = [
        Modality::CineSax,
        Modality::CineLax,
        Modality::Tagging,
        Modality::T1Map,
        Modality::T2Map,
        Modality::Flow2d,
        Modality::Blackblood,
        Modality::AortaSag,
        Modality::AortaTra,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::CineSax => "cine_sax",
            Modality::CineLax => "cine_lax",
            Modality::Tagging => "tagging",
            Modality::T1Map => "t1_map",
            Modality::T2Map => "t2_map",
            Modality::Flow2d => "flow2d",
            Modality::Blackblood => "blackblood",
            Modality::AortaSag => "aorta_sag",
            Modality::AortaTra => "aorta_tra",
        }
    }

    /// Intensities for chest wall, soft tissue, myocardium, LV blood,
    /// papillary muscle and RV blood.
    fn contrast(self) -> [f64; 6] {
        match self {
            Modality::CineSax | Modality::CineLax | Modality::Tagging => {
                [0.55, 0.35, 0.30, 0.90, 0.32, 0.85]
            }
            Modality::T1Map => [0.30, 0.50, 0.45, 0.65, 0.45, 0.62],
            Modality::T2Map => [0.40, 0.30, 0.35, 0.55, 0.35, 0.52],
            Modality::Flow2d => [0.30, 0.20, 0.25, 0.75, 0.25, 0.70],
            Modality::Blackblood => [0.70, 0.50, 0.60, 0.05, 0.60, 0.06],
            Modality::AortaSag | Modality::AortaTra => [0.35, 0.25, 0.30, 0.95, 0.30, 0.90],
        }
    }
}

impl std::fmt::Display for Modality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modality::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown modality tag {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub ky: usize,
    pub kx: usize,
    pub frames: usize,
    pub coils: usize,
    pub modality: Modality,
    pub seed: u64,
    pub contraction_amplitude: f64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            ky: 192,
            kx: 156,
            frames: 12,
            coils: 8,
            modality: Modality::CineSax,
            seed: 0,
            contraction_amplitude: 0.2,
        }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("ky", self.ky), ("kx", self.kx)] {
            if n < 32 || n % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} extent {n} must be even and >= 32"
                )));
            }
        }
        if self.frames == 0 || self.coils == 0 {
            return Err(Error::InvalidParameter("frames and coils must be >= 1".into()));
        }
        if !(0.0..=0.3).contains(&self.contraction_amplitude) {
            return Err(Error::InvalidParameter(format!(
                "contraction_amplitude {} outside [0, 0.3]",
                self.contraction_amplitude
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Phantom {
    /// Magnitude image, `frames x ky x kx`.
    pub image: Array3<f64>,
    /// Coil sensitivities, `coils x ky x kx`, unit sum-of-squares at every pixel.
    pub coils: Array3<Complex64>,
}

struct Geometry {
    body: (f64, f64),
    lv_center: (f64, f64),
    lv_outer: f64,
    lv_inner: f64,
    rv_center: (f64, f64),
    rv_axes: (f64, f64),
    papillary_angles: [f64; 2],
    tag_period: f64,
}

impl Geometry {
    fn draw(seed: u64) -> Self {
        let mut rng = seeded_rng(mix_seed(seed, 0x6765_6f6d));
        let mut jitter = |scale: f64| 1.0 + scale * (2.0 * rng.random::<f64>() - 1.0);
        let body = (0.82 * jitter(0.05), 0.72 * jitter(0.05));
        let lv_center = (0.08 * jitter(0.5), -0.05 * jitter(0.5));
        let lv_outer = 0.30 * jitter(0.08);
        let lv_inner = lv_outer * 0.68 * jitter(0.05);
        let rv_center = (lv_center.0 - 0.33 * jitter(0.08), lv_center.1 + 0.10 * jitter(0.3));
        let rv_axes = (0.14 * jitter(0.1), 0.26 * jitter(0.1));
        let a0 = 0.6 + 0.4 * (jitter(1.0) - 1.0);
        Self {
            body,
            lv_center,
            lv_outer,
            lv_inner,
            rv_center,
            rv_axes,
            papillary_angles: [a0, a0 + 1.6],
            tag_period: 0.12 * jitter(0.1),
        }
    }
}

fn inside(p: (f64, f64), c: (f64, f64), axes: (f64, f64)) -> bool {
    let dx = (p.0 - c.0) / axes.0;
    let dy = (p.1 - c.1) / axes.1;
    dx * dx + dy * dy <= 1.0
}

/// Coil sensitivities on a ring around the field of view, normalized to unit
/// sum-of-squares at every pixel.
pub fn coil_profiles(coils: usize, ky: usize, kx: usize, seed: u64) -> Array3<Complex64> {
    let mut rng = seeded_rng(mix_seed(seed, 0x636f_696c));
    let offset = 2.0 * PI * rng.random::<f64>();
    let width = 0.9;
    let mut maps = Array3::from_shape_fn((coils, ky, kx), |(c, i, j)| {
        let (x, y) = norm_coords(i, j, ky, kx);
        let angle = offset + 2.0 * PI * c as f64 / coils as f64;
        let (cx, cy) = (1.3 * angle.cos(), 1.3 * angle.sin());
        let d2 = (x - cx).powi(2) + (y - cy).powi(2);
        let mag = (-d2 / (2.0 * width * width)).exp();
        let phase = angle + 0.5 * (x * angle.cos() + y * angle.sin());
        Complex64::from_polar(mag, phase)
    });
    let sos = maps.map_axis(Axis(0), |v| v.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt());
    for mut coil in maps.axis_iter_mut(Axis(0)) {
        ndarray::Zip::from(&mut coil).and(&sos).for_each(|s, &n| *s /= n);
    }
    maps
}

/// `(x, y)` in `[-1, 1)` with the matrix center at the origin.
fn norm_coords(i: usize, j: usize, ky: usize, kx: usize) -> (f64, f64) {
    let y = (i as f64 - (ky / 2) as f64) / (ky / 2) as f64;
    let x = (j as f64 - (kx / 2) as f64) / (kx / 2) as f64;
    (x, y)
}

pub fn generate_phantom(spec: &PhantomSpec) -> Result<Phantom> {
    spec.validate()?;
    let g = Geometry::draw(spec.seed);
    let [wall, tissue, myo, blood, papillary, rv] = spec.modality.contrast();
    let frames = spec.frames;
    let mut image = Array3::zeros((frames, spec.ky, spec.kx));
    for (t, mut frame) in image.axis_iter_mut(Axis(0)).enumerate() {
        // 0 at end-diastole, 1 at peak contraction
        let phase = 0.5 * (1.0 - (2.0 * PI * t as f64 / frames as f64).cos());
        let a = spec.contraction_amplitude * phase;
        let r_out = g.lv_outer * (1.0 - 0.5 * a);
        let r_in = g.lv_inner * (1.0 - a);
        let rv_axes = (g.rv_axes.0 * (1.0 - a), g.rv_axes.1 * (1.0 - 0.5 * a));
        let pap: Vec<(f64, f64)> = g
            .papillary_angles
            .iter()
            .map(|&th| {
                let r = 0.72 * r_in;
                (g.lv_center.0 + r * th.cos(), g.lv_center.1 + r * th.sin())
            })
            .collect();
        let pap_r = 0.18 * r_in;
        for ((i, j), v) in frame.indexed_iter_mut() {
            let p = norm_coords(i, j, spec.ky, spec.kx);
            if !inside(p, (0.0, 0.0), g.body) {
                continue;
            }
            let mut val = if inside(p, (0.0, 0.0), (0.9 * g.body.0, 0.9 * g.body.1)) {
                tissue
            } else {
                wall
            };
            if inside(p, g.rv_center, rv_axes) {
                val = rv;
            }
            if inside(p, g.lv_center, (r_out, r_out)) {
                val = myo;
            }
            if inside(p, g.lv_center, (r_in, r_in)) {
                val = blood;
                if pap.iter().any(|&c| inside(p, c, (pap_r, pap_r))) {
                    val = papillary;
                }
            }
            if spec.modality == Modality::Tagging {
                let sx = (PI * p.0 / g.tag_period).cos();
                let sy = (PI * p.1 / g.tag_period).cos();
                val *= 0.3 + 0.7 * (sx * sy).abs();
            }
            *v = val;
        }
    }
    let coils = coil_profiles(spec.coils, spec.ky, spec.kx, spec.seed);
    Ok(Phantom { image, coils })
}

/// Fully sampled multi-coil k-space `coils x frames x ky x kx` of a magnitude image.
pub fn phantom_to_kspace(image: &Array3<f64>, coils: &Array3<Complex64>) -> Result<Array4<Complex64>> {
    let (frames, ky, kx) = image.dim();
    if (coils.dim().1, coils.dim().2) != (ky, kx) {
        return Err(Error::ExtentMismatch(format!(
            "image is {ky}x{kx}, coil maps are {}x{}",
            coils.dim().1,
            coils.dim().2
        )));
    }
    let op = EncodingOperator::new(coils.clone(), Array3::from_elem((frames, ky, kx), true))?;
    op.apply(&image.mapv(|v| Complex64::new(v, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::ifft2c;

    fn small(modality: Modality) -> PhantomSpec {
        PhantomSpec {
            ky: 48,
            kx: 40,
            frames: 4,
            coils: 4,
            modality,
            seed: 11,
            contraction_amplitude: 0.2,
        }
    }

    #[test]
    fn static_phantom_has_identical_frames() {
        let spec = PhantomSpec {
            frames: 3,
            contraction_amplitude: 0.0,
            ..small(Modality::CineSax)
        };
        let p = generate_phantom(&spec).unwrap();
        assert_eq!(p.image.index_axis(Axis(0), 0), p.image.index_axis(Axis(0), 2));
    }

    #[test]
    fn motion_changes_frames() {
        let p = generate_phantom(&small(Modality::CineSax)).unwrap();
        assert_ne!(p.image.index_axis(Axis(0), 0), p.image.index_axis(Axis(0), 2));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_phantom(&small(Modality::T1Map)).unwrap();
        let b = generate_phantom(&small(Modality::T1Map)).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.coils, b.coils);
    }

    #[test]
    fn single_coil_has_unit_magnitude() {
        let spec = PhantomSpec { coils: 1, ..small(Modality::CineSax) };
        let p = generate_phantom(&spec).unwrap();
        assert!(p.coils.iter().all(|s| (s.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn coil_sum_of_squares_is_one() {
        let p = generate_phantom(&small(Modality::CineSax)).unwrap();
        let sos = p.coils.map_axis(Axis(0), |v| v.iter().map(|s| s.norm_sqr()).sum::<f64>());
        assert!(sos.iter().all(|&s| s > 0.0 && s <= 1.0 + 1e-5));
    }

    #[test]
    fn modality_preserves_support() {
        let base = generate_phantom(&small(Modality::CineSax)).unwrap().image.mapv(|v| v > 0.0);
        for m in Modality::ALL {
            let other = generate_phantom(&small(m)).unwrap().image.mapv(|v| v > 0.0);
            assert_eq!(base, other, "{m}");
        }
    }

    #[test]
    fn kspace_parseval_and_inverse() {
        let spec = small(Modality::Blackblood);
        let p = generate_phantom(&spec).unwrap();
        let y = phantom_to_kspace(&p.image, &p.coils).unwrap();
        let ky: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let mut weighted = 0.0;
        for c in 0..spec.coils {
            for t in 0..spec.frames {
                for ((i, j), v) in p.image.index_axis(Axis(0), t).indexed_iter() {
                    weighted += (p.coils[[c, i, j]] * v).norm_sqr();
                }
            }
        }
        assert!(((ky - weighted) / weighted).abs() < 1e-4);

        let single = PhantomSpec { coils: 1, ..spec };
        let p = generate_phantom(&single).unwrap();
        let ones = Array3::from_elem((1, single.ky, single.kx), Complex64::new(1.0, 0.0));
        let y = phantom_to_kspace(&p.image, &ones).unwrap();
        let back = ifft2c(&y.index_axis(Axis(0), 0).index_axis(Axis(0), 1).to_owned());
        let truth = p.image.index_axis(Axis(0), 1);
        let err: f64 = back.iter().zip(truth.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let energy: f64 = truth.iter().map(|b| b * b).sum();
        assert!((err / energy).sqrt() < 1e-5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate_phantom(&PhantomSpec { ky: 30, ..small(Modality::CineSax) }).is_err());
        assert!(generate_phantom(&PhantomSpec { kx: 33, ..small(Modality::CineSax) }).is_err());
        assert!(generate_phantom(&PhantomSpec {
            contraction_amplitude: 0.5,
            ..small(Modality::CineSax)
        })
        .is_err());
        assert!("cine".parse::<Modality>().is_err());
    }
}
