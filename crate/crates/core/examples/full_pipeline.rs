//! The whole benchmark through the command-line front end: phantom dataset,
//! undersampling, three reconstruction "teams", evaluation and ranking.
//!
//! Usage: cargo run --release --example full_pipeline [out_dir]

use kspace_bench::pipeline::run_from;

fn main() -> kspace_bench::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("kspace_bench_pipeline").display().to_string());
    let p = |sub: &str| format!("{out}/{sub}");

    run_from([
        "kspace-bench", "phantom", "--cases", "4", "--frames", "6", "--coils", "6",
        "--matrix", "64x64", "--modalities", "cine_sax,t2_map", "--seed", "1", "--out", &p("data"),
    ])?;
    run_from([
        "kspace-bench", "undersample", "--data", &p("data"), "--patterns", "uniform,radial",
        "--af", "4,8", "--preset", "task2", "--seed", "2", "--out", &p("undersampled"),
    ])?;
    let teams = ["zf", "cgsense", "admm_tv"];
    for method in teams {
        run_from(["kspace-bench", "recon", "--data", &p("undersampled"), "--method", method, "--out", &p(method)])?;
        run_from([
            "kspace-bench", "eval", "--ref", &p("data"), "--pred", &p(method), "--team", method,
            "--out", &p(&format!("eval_{method}")),
        ])?;
    }
    let metrics: Vec<String> = teams.iter().map(|t| p(&format!("eval_{t}/metrics.jsonl"))).collect();
    run_from(["kspace-bench", "rank", "--metrics", &metrics.join(","), "--out", &p("leaderboard")])?;
    println!("outputs under {out}");
    Ok(())
}
