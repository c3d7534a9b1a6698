//! End-to-end CLI checks: exit codes, checkpoint/resume, file output.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_towersearch"))
}

#[test]
fn exit_codes_distinguish_outcomes() {
    // Pass: a quotient computation.
    let out = bin().args(["pquotient", "koch-q2", "-c", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    // Error: unknown builtin.
    let out = bin().args(["pquotient", "no-such-presentation"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Negative verdict: the root is not certifiably moribund.
    let out = bin().args(["moribund", "free-2@1", "--depth", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Positive verdict: Q8 lives in the tree under free-2; use its pcp file.
    let dir = std::env::temp_dir().join(format!("cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let q8 = dir.join("c4.pcp");
    let out = bin()
        .args(["pquotient", "free-1", "-c", "3", "--out", q8.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // A cyclic group is terminal once it stops growing... Z/2^3 is not
    // terminal (Z/16 sits above it); moribund stays unknown, exit 2.
    let out = bin().args(["moribund", q8.to_str().unwrap(), "--depth", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn search_budget_checkpoint_resume_via_cli() {
    let dir = std::env::temp_dir().join(format!("cli-resume-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ckpt = dir.join("run.ckpt");
    let stats = dir.join("stats.json");
    // Budgeted run exhausts with exit code 3 and leaves a checkpoint.
    let out = bin()
        .args([
            "search", "free-2@1", "--max-class", "3", "--filters", "rank", "--rmax", "3",
            "--budget", "3", "--checkpoint", ckpt.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "budget exhaustion is a distinct exit code");
    assert!(ckpt.exists());
    // Resume to completion; statistics must match the uninterrupted run.
    let out = bin()
        .args([
            "search", "free-2@1", "--max-class", "3", "--filters", "rank", "--rmax", "3",
            "--checkpoint", ckpt.to_str().unwrap(), "--resume",
            "--stats-json", stats.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    let classes = v["classes"].as_array().unwrap();
    let c3 = classes.iter().find(|c| c["class"] == 3).unwrap();
    assert_eq!(c3["enumerated"], 129);
    assert_eq!(c3["survivors"], 120);
    // Resume against a different fixture must be refused.
    let out = bin()
        .args([
            "search", "free-2@1", "--max-class", "3", "--filters", "rank",
            "--fixture", "q5460",
            "--checkpoint", ckpt.to_str().unwrap(), "--resume",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fixture hash mismatch"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_json_is_machine_readable() {
    let out = bin().args(["report", "koch-q2@2", "--depth", "0", "--json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order_exponent"], 9);
    assert_eq!(v["relator_bounds"], serde_json::json!([5, 5]));
}
