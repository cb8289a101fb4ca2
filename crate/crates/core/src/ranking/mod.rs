//! Reader-study statistics and leaderboard construction.

mod icc;
mod leaderboard;
mod polyfit;
mod readers;
mod wilcoxon;

pub use icc::{icc_3k, IccResult};
pub use leaderboard::{
    aggregate_final_rank, attach_p_values, competition_rank, leaderboard_csv, leaderboard_json,
    write_leaderboard, LeaderboardEntry, PValue, PairedSamples, TeamScores,
};
pub use polyfit::{polyfit, polyfit_cubic, PolyFit};
pub use readers::{
    median_aggregate, median_of, reader_diff, reader_zscore, DiffRow, ReaderRow, ReaderScoreTable,
    REFERENCE_ENTITY,
};
pub use wilcoxon::{
    exact_p_value, normal_p_value, signed_ranks, significance_stars, wilcoxon_both_routes,
    wilcoxon_signed_rank, WilcoxonMethod, WilcoxonResult, EXACT_MAX_N,
};
