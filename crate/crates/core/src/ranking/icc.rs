//! ICC(3,k): two-way mixed, consistency, average measures, from the
//! additive two-way ANOVA (no interaction term).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IccResult {
    /// `None` when `MS_rows` is zero and the coefficient is undefined.
    pub icc: Option<f64>,
    pub ms_rows: f64,
    pub ms_error: f64,
}

/// `ratings[case][reader]`
pub fn icc_3k(ratings: &[Vec<f64>]) -> Result<IccResult> {
    let n = ratings.len();
    let k = ratings.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(Error::InvalidParameter(format!(
            "ICC needs >= 2 cases and >= 2 readers, got {n} x {k}"
        )));
    }
    if ratings.iter().any(|r| r.len() != k) {
        return Err(Error::ExtentMismatch("ragged ratings matrix".into()));
    }
    let row_means: Vec<f64> = ratings.iter().map(|r| r.iter().sum::<f64>() / k as f64).collect();
    let col_means: Vec<f64> = (0..k)
        .map(|j| ratings.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let ss_rows = k as f64 * row_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let mut ss_error = 0.0;
    for (i, row) in ratings.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            ss_error += (v - row_means[i] - col_means[j] + grand).powi(2);
        }
    }
    let ms_rows = ss_rows / (n - 1) as f64;
    let ms_error = ss_error / ((n - 1) * (k - 1)) as f64;
    let icc = (ms_rows > 0.0).then(|| (ms_rows - ms_error) / ms_rows);
    Ok(IccResult {
        icc,
        ms_rows,
        ms_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns_give_one() {
        let m: Vec<Vec<f64>> = (0..10).map(|i| vec![0.1 * i as f64; 3]).collect();
        assert_eq!(icc_3k(&m).unwrap().icc, Some(1.0));
    }

    #[test]
    fn constant_rows_are_undefined() {
        let m = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(icc_3k(&m).unwrap().icc, None);
    }

    #[test]
    fn textbook_example() {
        // Shrout & Fleiss (1979) table 2: ICC(3,k) = 0.91
        let m = vec![
            vec![9.0, 2.0, 5.0, 8.0],
            vec![6.0, 1.0, 3.0, 2.0],
            vec![8.0, 4.0, 6.0, 8.0],
            vec![7.0, 1.0, 2.0, 6.0],
            vec![10.0, 5.0, 6.0, 9.0],
            vec![6.0, 2.0, 4.0, 7.0],
        ];
        let icc = icc_3k(&m).unwrap().icc.unwrap();
        assert!((icc - 0.909).abs() < 1e-3, "{icc}");
    }

    #[test]
    fn too_small() {
        assert!(icc_3k(&[vec![1.0, 2.0]]).is_err());
    }
}
