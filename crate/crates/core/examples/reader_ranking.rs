//! Reader-study statistics: difference scores, per-reader z-scores, median
//! aggregation, ICC(3,k), Wilcoxon tests and the final leaderboard.
//!
//! Usage: cargo run --example reader_ranking

use kspace_bench::phantom::Modality;
use kspace_bench::ranking::*;
use kspace_bench::sampling::Pattern;
use rand::{Rng, SeedableRng};

fn main() -> kspace_bench::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let teams = [("alpha", 0.6), ("beta", 0.2), ("gamma", -0.4), ("delta", -0.4)];
    let mut rows = Vec::new();
    for reader in ["r1", "r2", "r3"] {
        let harsh = if reader == "r2" { -1.0 } else { 0.0 };
        for case in 0..12 {
            let quality: f64 = 3.5 + harsh + rng.random::<f64>();
            let mut push = |entity: &str, q: f64| {
                rows.push(ReaderRow {
                    reader_id: reader.into(),
                    entity: entity.into(),
                    case_id: format!("P{case:03}"),
                    modality: Modality::CineSax,
                    pattern: Pattern::Uniform,
                    af: 8,
                    score: q.round().clamp(1.0, 5.0) as u8,
                })
            };
            push(REFERENCE_ENTITY, quality + 0.5);
            for (team, offset) in teams {
                push(team, quality + offset + rng.random::<f64>() - 0.5);
            }
        }
    }
    let table = ReaderScoreTable::new(rows)?;
    let z = reader_zscore(reader_diff(&table)?)?;
    let medians = median_aggregate(&z)?;
    for ((team, modality), m) in &medians {
        println!("median z {team:6} {modality}: {m:+.3}");
    }

    // readers as columns, one row per rated image
    let mut items = std::collections::BTreeMap::<(String, String), Vec<f64>>::new();
    for r in table.rows() {
        items.entry((r.entity.clone(), r.case_id.clone())).or_default().push(r.score as f64);
    }
    let icc = icc_3k(&items.into_values().collect::<Vec<_>>())?;
    println!("ICC(3,k) = {:?}", icc.icc);

    let ssim = [0.91, 0.88, 0.85, 0.86];
    let scores: Vec<TeamScores> = teams
        .iter()
        .zip(ssim)
        .map(|((team, _), s)| TeamScores {
            team: team.to_string(),
            ssim_adj_overall: s,
            reader_score_mean: medians.get(&(team.to_string(), Modality::CineSax)).copied(),
        })
        .collect();
    let mut board = aggregate_final_rank(&scores);
    let mut reader_samples = PairedSamples::new();
    for r in &z {
        reader_samples
            .entry(r.team.clone())
            .or_default()
            .insert(format!("{}/{}", r.reader_id, r.case_id), r.z.unwrap_or_default());
    }
    attach_p_values(&mut board, &[("reader".to_string(), reader_samples)].into())?;
    print!("{}", leaderboard_csv(&board)?);

    let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0; 3])?;
    println!("wilcoxon {{+1,+2,+3}}: W+ = {}, p = {}", r.w_plus, r.p_value);

    let x: Vec<f64> = (0..8).map(|i| i as f64 / 8.0).collect();
    let y: Vec<f64> = x.iter().map(|x| 2.0 - x + 0.5 * x * x * x).collect();
    println!("cubic fit {:?}", polyfit_cubic(&x, &y)?.coefficients);
    Ok(())
}
