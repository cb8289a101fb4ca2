use std::path::Path;
use std::process::{Command, Output};

use kspace_bench::pipeline::{RunManifest, MANIFEST_FILE};
use serde_json::Value;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kspace-bench"))
        .args(args)
        .env_remove("KSPACE_BENCH_THREADS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = bin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn phantom(out: &Path, seed: &str) {
    ok(&[
        "phantom", "--cases", "2", "--frames", "4", "--coils", "4", "--matrix", "64x48",
        "--modalities", "cine_sax,tagging", "--seed", seed, "--out", s(out),
    ]);
}

#[test]
fn phantom_splits_and_digests() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    phantom(&a, "7");
    phantom(&b, "7");
    assert!(a.join("train/P001/cine_sax/ref_image.cxa").is_file());
    assert!(a.join("train/P001/tagging/csm.cxa").is_file());
    assert!(a.join("test/P002/cine_sax/full_kspace.cxa").is_file());
    assert!(!a.join("val").join("P001").exists());
    let ma = RunManifest::read(&a).unwrap();
    let mb = RunManifest::read(&b).unwrap();
    assert_eq!(ma.outputs.len(), 12);
    assert_eq!(ma.outputs, mb.outputs);
    assert_eq!(ma.subcommand, "phantom");
}

#[test]
fn argument_errors() {
    let tmp = TempDir::new().unwrap();
    let out = bin(&["phantom", "--modalities", "cine_sax,mrcp", "--out", s(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mrcp"));

    let out = bin(&["mask", "--pattern", "radial", "--af", "4", "--preset", "task1", "--out", s(tmp.path())]);
    assert!(!out.status.success());
    let out = bin(&["mask", "--pattern", "uniform", "--af", "16", "--preset", "task1", "--out", s(tmp.path())]);
    assert!(!out.status.success());
    for af in ["4", "8", "10"] {
        ok(&["mask", "--pattern", "uniform", "--af", af, "--preset", "task1", "--matrix", "64x48",
             "--frames", "2", "--out", s(&tmp.path().join(af))]);
    }
    ok(&["mask", "--pattern", "gaussian", "--af", "24", "--preset", "task2", "--matrix", "192x48", "--acs-lines", "8",
         "--frames", "2", "--out", s(&tmp.path().join("g24"))]);
    assert!(tmp.path().join("g24").join(MANIFEST_FILE).is_file());
}

#[test]
fn invalid_thread_count_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kspace-bench"))
        .args(["mask", "--pattern", "uniform", "--af", "4", "--out", s(tmp.path())])
        .env("KSPACE_BENCH_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("KSPACE_BENCH_THREADS"));
}

fn metrics_lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn pipeline_eval_and_rank() {
    let tmp = TempDir::new().unwrap();
    let t = |n: &str| tmp.path().join(n);
    phantom(&t("data"), "1");
    ok(&["undersample", "--data", s(&t("data")), "--patterns", "uniform,radial", "--af", "4",
         "--acs-lines", "12", "--seed", "2", "--out", s(&t("us"))]);
    let mut metrics = Vec::new();
    for m in ["zf", "cgsense", "admm_tv"] {
        ok(&["recon", "--data", s(&t("us")), "--method", m, "--out", s(&t(&format!("rec_{m}")))]);
        ok(&["eval", "--ref", s(&t("data")), "--pred", s(&t(&format!("rec_{m}"))), "--team", m,
             "--out", s(&t(&format!("ev_{m}")))]);
        metrics.push(t(&format!("ev_{m}")).join("metrics.jsonl"));
        assert!(t(&format!("rec_{m}")).join(MANIFEST_FILE).is_file());
        assert!(t(&format!("ev_{m}")).join(MANIFEST_FILE).is_file());
    }

    // leaderboard agrees with the solver ordering
    let list = metrics.iter().map(|p| s(p)).collect::<Vec<_>>().join(",");
    let out = ok(&["rank", "--metrics", &list, "--out", s(&t("rank"))]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("final_rank,team"));
    let board: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(t("rank").join("leaderboard.json")).unwrap()).unwrap();
    let ssim = |team: &str| board.iter().find(|e| e["team"] == team).unwrap()["ssim_adj_overall"].as_f64().unwrap();
    let rank = |team: &str| board.iter().find(|e| e["team"] == team).unwrap()["final_rank"].as_u64().unwrap();
    println!("ssim_adj zf {:.4} cgsense {:.4} admm_tv {:.4}", ssim("zf"), ssim("cgsense"), ssim("admm_tv"));
    assert!(ssim("zf") < ssim("cgsense"));
    assert!(ssim("cgsense") <= ssim("admm_tv") + 0.01);
    assert_eq!(rank("zf"), 3);

    // a missing prediction is data, not an error
    std::fs::remove_file(t("rec_zf").join("train/P001/cine_sax/uniform_af4/recon.cxa")).unwrap();
    ok(&["eval", "--ref", s(&t("data")), "--pred", s(&t("rec_zf")), "--team", "zf",
         "--cells", "uniform_af4,radial_af4", "--out", s(&t("ev_missing"))]);
    let recs = metrics_lines(&t("ev_missing").join("metrics.jsonl"));
    assert_eq!(recs.len(), 8);
    let missing: Vec<&Value> = recs.iter().filter(|r| r["failure_reason"] == "missing_file").collect();
    assert_eq!(missing.len(), 1);
    assert_eq!(missing[0]["case_id"], "train/P001");
    assert_eq!(missing[0]["valid"], false);

    // reader table without a reference row for one group
    let csv = "reader_id,entity,case_id,modality,pattern,af,score\n\
               r1,REFERENCE,train/P001,cine_sax,uniform,4,5\n\
               r1,zf,train/P001,cine_sax,uniform,4,2\n\
               r1,cgsense,train/P001,cine_sax,uniform,4,4\n\
               r1,zf,test/P002,cine_sax,uniform,4,3\n";
    std::fs::write(t("readers.csv"), csv).unwrap();
    let out = bin(&["rank", "--metrics", &list, "--readers", s(&t("readers.csv")), "--out", s(&t("rank2"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("case=test/P002"), "{err}");
    assert!(err.contains("reader=r1"));
}
