//! Competition ranking and the final leaderboard.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::wilcoxon::{wilcoxon_signed_rank, WilcoxonResult};
use crate::error::{Error, Result};

/// Competition ("1224") ranks: ties share the smallest rank and the next
/// rank skips. NaN ranks behind every finite value.
pub fn competition_rank(values: &[f64], higher_is_better: bool) -> Vec<usize> {
    let better = |a: f64, b: f64| -> bool {
        match (a.is_nan(), b.is_nan()) {
            (true, _) => false,
            (false, true) => true,
            _ if higher_is_better => a > b,
            _ => a < b,
        }
    };
    values
        .iter()
        .map(|&v| 1 + values.iter().filter(|&&w| better(w, v)).count())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub p: f64,
    pub stars: String,
    pub n_pairs: usize,
    pub degenerate: bool,
}

impl From<&WilcoxonResult> for PValue {
    fn from(r: &WilcoxonResult) -> Self {
        Self {
            p: r.p_value,
            stars: r.stars().to_string(),
            n_pairs: r.n_nonzero,
            degenerate: r.degenerate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub team: String,
    pub ssim_adj_overall: f64,
    pub reader_score_mean: Option<f64>,
    pub ssim_rank: usize,
    pub reader_rank: Option<usize>,
    pub final_rank: usize,
    /// Wilcoxon test against the top-ranked team, keyed by metric name.
    /// Empty for the top team itself.
    pub p_values: BTreeMap<String, PValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeamScores {
    pub team: String,
    pub ssim_adj_overall: f64,
    pub reader_score_mean: Option<f64>,
}

/// Rank SSIM and reader scores separately, average the two ranks and
/// competition-rank that average. Teams without a reader score are ranked
/// on SSIM alone. Entries come back in leaderboard order.
pub fn aggregate_final_rank(teams: &[TeamScores]) -> Vec<LeaderboardEntry> {
    let ssim: Vec<f64> = teams.iter().map(|t| t.ssim_adj_overall).collect();
    let ssim_rank = competition_rank(&ssim, true);
    let have_readers = teams.iter().any(|t| t.reader_score_mean.is_some());
    let reader_rank: Vec<Option<usize>> = if have_readers {
        let r: Vec<f64> = teams
            .iter()
            .map(|t| t.reader_score_mean.unwrap_or(f64::NAN))
            .collect();
        competition_rank(&r, true)
            .into_iter()
            .zip(teams)
            .map(|(rank, t)| t.reader_score_mean.map(|_| rank))
            .collect()
    } else {
        vec![None; teams.len()]
    };
    let avg: Vec<f64> = ssim_rank
        .iter()
        .zip(&reader_rank)
        .map(|(&s, r)| match r {
            Some(r) => (s + r) as f64 / 2.0,
            None if have_readers => f64::NAN,
            None => s as f64,
        })
        .collect();
    let final_rank = competition_rank(&avg, false);
    let mut entries: Vec<LeaderboardEntry> = teams
        .iter()
        .enumerate()
        .map(|(i, t)| LeaderboardEntry {
            team: t.team.clone(),
            ssim_adj_overall: t.ssim_adj_overall,
            reader_score_mean: t.reader_score_mean,
            ssim_rank: ssim_rank[i],
            reader_rank: reader_rank[i],
            final_rank: final_rank[i],
            p_values: BTreeMap::new(),
        })
        .collect();
    entries.sort_by(|a, b| a.final_rank.cmp(&b.final_rank).then_with(|| a.team.cmp(&b.team)));
    entries
}

/// Per-case paired samples for one metric: `samples[team][case_key] = value`.
pub type PairedSamples = BTreeMap<String, BTreeMap<String, f64>>;

/// Attach Wilcoxon p-values of every team against the leaderboard's first
/// entry, pairing on shared case keys.
pub fn attach_p_values(
    entries: &mut [LeaderboardEntry],
    metrics: &BTreeMap<String, PairedSamples>,
) -> Result<()> {
    let Some(top) = entries.first().map(|e| e.team.clone()) else {
        return Ok(());
    };
    for entry in entries.iter_mut().skip(1) {
        for (metric, samples) in metrics {
            let (Some(a), Some(b)) = (samples.get(&entry.team), samples.get(&top)) else {
                continue;
            };
            let (xs, ys): (Vec<f64>, Vec<f64>) = a
                .iter()
                .filter_map(|(k, v)| b.get(k).map(|w| (*v, *w)))
                .unzip();
            if xs.is_empty() {
                continue;
            }
            let r = wilcoxon_signed_rank(&xs, &ys)?;
            entry.p_values.insert(metric.clone(), PValue::from(&r));
        }
    }
    Ok(())
}

pub fn leaderboard_json(entries: &[LeaderboardEntry]) -> Result<String> {
    Ok(serde_json::to_string_pretty(entries)?)
}

/// One row per team; p-values flattened to `p_<metric>` columns.
pub fn leaderboard_csv(entries: &[LeaderboardEntry]) -> Result<String> {
    let metrics: Vec<String> = entries
        .iter()
        .flat_map(|e| e.p_values.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "final_rank".to_string(),
        "team".into(),
        "ssim_adj_overall".into(),
        "reader_score_mean".into(),
        "ssim_rank".into(),
        "reader_rank".into(),
    ];
    header.extend(metrics.iter().map(|m| format!("p_{m}")));
    w.write_record(&header)?;
    for e in entries {
        let mut row = vec![
            e.final_rank.to_string(),
            e.team.clone(),
            format!("{:.6}", e.ssim_adj_overall),
            e.reader_score_mean.map_or(String::new(), |v| format!("{v:.6}")),
            e.ssim_rank.to_string(),
            e.reader_rank.map_or(String::new(), |v| v.to_string()),
        ];
        for m in &metrics {
            row.push(
                e.p_values
                    .get(m)
                    .map_or(String::new(), |p| format!("{:.6}{}", p.p, p.stars)),
            );
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_leaderboard(entries: &[LeaderboardEntry], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    for (name, body) in [
        ("leaderboard.csv", leaderboard_csv(entries)?),
        ("leaderboard.json", leaderboard_json(entries)?),
    ] {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
