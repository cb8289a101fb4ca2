//! Paired two-sided Wilcoxon signed-rank test.
//!
//! Zero differences are dropped and tied |d| get average ranks. Up to
//! [`EXACT_MAX_N`] non-zero pairs the null distribution of W+ is enumerated
//! exactly (by counting sign assignments over the actual, possibly tied,
//! ranks); above that a normal approximation with tie and continuity
//! corrections is used.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    pub n_nonzero: usize,
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

impl WilcoxonResult {
    pub fn degenerate(&self) -> bool {
        self.method == WilcoxonMethod::Degenerate
    }

    pub fn stars(&self) -> &'static str {
        significance_stars(self.p_value)
    }
}

/// `**` below 0.01, `*` below 0.05, empty otherwise.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Average ranks (1-based) of `|d|`, in input order.
pub fn signed_ranks(diffs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..diffs.len()).collect();
    idx.sort_by(|&a, &b| diffs[a].abs().total_cmp(&diffs[b].abs()));
    let mut ranks = vec![0.0; diffs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && diffs[idx[j + 1]].abs() == diffs[idx[i]].abs() {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn nonzero(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "paired samples need equal non-zero lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect())
}

fn w_plus(diffs: &[f64], ranks: &[f64]) -> f64 {
    diffs
        .iter()
        .zip(ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum()
}

/// Exact two-sided p of the observed W+ given (possibly tied) ranks.
pub fn exact_p_value(ranks: &[f64], observed_w_plus: f64) -> f64 {
    // average ranks are multiples of 1/2, so doubled ranks are integers
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let total = (1u64 << ranks.len()) as f64;
    let w = (2.0 * observed_w_plus).round() as usize;
    let upper: u64 = counts[w..].iter().sum();
    let lower: u64 = counts[..=w].iter().sum();
    (2.0 * upper.min(lower) as f64 / total).min(1.0)
}

/// Normal-approximation two-sided p with tie and continuity corrections.
pub fn normal_p_value(ranks: &[f64], observed_w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((observed_w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let std_normal = Normal::standard();
    (2.0 * (1.0 - std_normal.cdf(z))).min(1.0)
}

pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    let diffs = nonzero(a, b)?;
    if diffs.is_empty() {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            n_nonzero: 0,
            p_value: 1.0,
            method: WilcoxonMethod::Degenerate,
        });
    }
    let ranks = signed_ranks(&diffs);
    let w = w_plus(&diffs, &ranks);
    let (p_value, method) = if diffs.len() <= EXACT_MAX_N {
        (exact_p_value(&ranks, w), WilcoxonMethod::Exact)
    } else {
        (normal_p_value(&ranks, w), WilcoxonMethod::Normal)
    };
    Ok(WilcoxonResult {
        w_plus: w,
        n_nonzero: diffs.len(),
        p_value,
        method,
    })
}

/// Both p-value routes for the same pairs, regardless of sample size.
pub fn wilcoxon_both_routes(a: &[f64], b: &[f64]) -> Result<Option<(f64, f64)>> {
    let diffs = nonzero(a, b)?;
    if diffs.is_empty() {
        return Ok(None);
    }
    let ranks = signed_ranks(&diffs);
    let w = w_plus(&diffs, &ranks);
    Ok(Some((exact_p_value(&ranks, w), normal_p_value(&ranks, w))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_two_three() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.w_plus, 6.0);
        assert_eq!(r.p_value, 0.25);
        assert_eq!(r.method, WilcoxonMethod::Exact);
    }

    #[test]
    fn equal_samples_are_degenerate() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert!(r.degenerate());
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn average_ranks_for_ties() {
        assert_eq!(signed_ranks(&[1.0, -1.0, 3.0, 2.0]), vec![1.5, 1.5, 4.0, 3.0]);
    }

    #[test]
    fn length_mismatch_is_error() {
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]).is_err());
        assert!(wilcoxon_signed_rank(&[], &[]).is_err());
    }

    #[test]
    fn stars() {
        assert_eq!(significance_stars(0.004), "**");
        assert_eq!(significance_stars(0.03), "*");
        assert_eq!(significance_stars(0.2), "");
    }

    #[test]
    fn large_n_uses_normal_route() {
        let a: Vec<f64> = (0..30).map(|i| i as f64 + 0.5).collect();
        let b = vec![0.0; 30];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        assert!(r.p_value < 1e-5);
    }
}
