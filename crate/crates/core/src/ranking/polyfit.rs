//! Least-squares polynomial fits via QR of the Vandermonde matrix.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    /// Constant term first.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
    if x.len() != y.len() {
        return Err(Error::ExtentMismatch(format!(
            "x has {} points, y has {}",
            x.len(),
            y.len()
        )));
    }
    let mut distinct = x.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= degree {
        return Err(Error::RankDeficient(format!(
            "degree {degree} fit needs {} distinct x, got {}",
            degree + 1,
            distinct.len()
        )));
    }
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * &b;
    let r = qr.r();
    let coef = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::RankDeficient("singular triangular factor".into()))?;
    let residual_norm = (&a * &coef - &b).norm();
    Ok(PolyFit {
        coefficients: coef.iter().copied().collect(),
        residual_norm,
    })
}

pub fn polyfit_cubic(x: &[f64], y: &[f64]) -> Result<PolyFit> {
    polyfit(x, y, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_cubic() {
        let x: Vec<f64> = (0..12).map(|i| -1.5 + 0.3 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.0 - x + 0.5 * x.powi(3)).collect();
        let fit = polyfit_cubic(&x, &y).unwrap();
        for (c, want) in fit.coefficients.iter().zip([2.0, -1.0, 0.0, 0.5]) {
            assert!((c - want).abs() < 1e-8, "{:?}", fit.coefficients);
        }
        assert!(fit.residual_norm < 1e-10);
        assert!((fit.eval(1.0) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn constant_data() {
        let fit = polyfit_cubic(&[0.1, 0.2, 0.3, 0.4, 0.5], &[3.0; 5]).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-9);
        assert!(fit.coefficients[1..].iter().all(|c| c.abs() < 1e-7));
    }

    #[test]
    fn too_few_distinct_points() {
        assert!(matches!(
            polyfit_cubic(&[1.0, 1.0, 2.0, 3.0, 3.0], &[1.0; 5]),
            Err(Error::RankDeficient(_))
        ));
    }
}
