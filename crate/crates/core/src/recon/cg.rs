//! Conjugate gradients for Hermitian positive semidefinite systems.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::util::{axpy, has_non_finite, inner, norm};

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Array2<Complex64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||` at exit.
    pub relative_residual: f64,
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Solve `A x = b` starting from `x0`, stopping once the relative residual
/// drops to `tolerance` or after `max_iters` steps.
pub fn conjugate_gradient<F>(
    apply: F,
    b: &Array2<Complex64>,
    x0: Array2<Complex64>,
    max_iters: usize,
    tolerance: f64,
    method: &'static str,
) -> Result<CgOutcome>
where
    F: Fn(&Array2<Complex64>) -> Array2<Complex64>,
{
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: Array2::zeros(b.dim()),
            iterations: 0,
            relative_residual: 0.0,
            history: vec![0.0],
            converged: true,
        });
    }
    let mut x = x0;
    let mut r = b - &apply(&x);
    let mut p = r.clone();
    let mut rr = inner(&r, &r).re;
    if !rr.is_finite() {
        return Err(Error::NanDuringIteration {
            method,
            iteration: 0,
        });
    }
    let mut history = vec![rr.sqrt() / b_norm];
    let mut iterations = 0;
    while iterations < max_iters && rr.sqrt() / b_norm > tolerance {
        let ap = apply(&p);
        let pap = inner(&p, &ap).re;
        if !pap.is_finite() || has_non_finite(&ap) {
            return Err(Error::NanDuringIteration {
                method,
                iteration: iterations,
            });
        }
        if pap <= 0.0 {
            // search direction in the null space: nothing left to reduce
            break;
        }
        let alpha = rr / pap;
        axpy(&mut x, Complex64::new(alpha, 0.0), &p);
        axpy(&mut r, Complex64::new(-alpha, 0.0), &ap);
        let rr_new = inner(&r, &r).re;
        if !rr_new.is_finite() {
            return Err(Error::NanDuringIteration {
                method,
                iteration: iterations,
            });
        }
        let beta = rr_new / rr;
        p.zip_mut_with(&r, |p, &r| *p = r + *p * beta);
        rr = rr_new;
        iterations += 1;
        history.push(rr.sqrt() / b_norm);
    }
    let relative_residual = rr.sqrt() / b_norm;
    Ok(CgOutcome {
        x,
        iterations,
        relative_residual,
        history,
        converged: relative_residual <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_diagonal_system() {
        let d = Array2::from_shape_fn((4, 4), |(i, j)| 1.0 + (i * 4 + j) as f64);
        let b = Array2::from_elem((4, 4), Complex64::new(1.0, -2.0));
        let out = conjugate_gradient(
            |x| x * &d.mapv(|v| Complex64::new(v, 0.0)),
            &b,
            Array2::zeros((4, 4)),
            100,
            1e-12,
            "test",
        )
        .unwrap();
        assert!(out.converged);
        for ((i, j), v) in out.x.indexed_iter() {
            assert!((v * d[[i, j]] - b[[i, j]]).norm() < 1e-9);
        }
    }

    #[test]
    fn nan_operator_is_an_error() {
        let b = Array2::from_elem((2, 2), Complex64::new(1.0, 0.0));
        let err = conjugate_gradient(
            |x| x.mapv(|_| Complex64::new(f64::NAN, 0.0)),
            &b,
            Array2::zeros((2, 2)),
            5,
            1e-9,
            "test",
        )
        .unwrap_err();
        assert!(matches!(err, Error::NanDuringIteration { .. }));
    }
}
