//! End-to-end tests of the binary: exit codes, printed values, file
//! artifacts, and byte-for-byte determinism of reruns.

use std::path::Path;
use std::process::{Command, Output};

use colnum::lp;
use colnum::model::TypedMatrix;
use colnum::numtheory::ArithCache;

fn colnum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colnum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// The manifest is the last stdout line whenever files were written.
fn manifest_of(out: &Output) -> serde_json::Value {
    let text = stdout_of(out);
    let line = text.lines().last().expect("manifest line");
    serde_json::from_str(line).expect("manifest is JSON")
}

fn artifact_sha(manifest: &serde_json::Value, index: usize) -> String {
    manifest["artifacts"][index]["sha256"]
        .as_str()
        .expect("sha field")
        .to_string()
}

#[test]
fn zm_exact_prints_the_pinned_value() {
    let out = colnum(&["zm", "--m", "5", "--mode", "exact"]);
    assert_eq!(code_of(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("119/120"));
    let approx = lines.next().expect("approx line");
    assert!(approx.starts_with('~') && approx.ends_with("(approx)"), "{approx}");
}

#[test]
fn zm_exact_rejects_certificate_emission() {
    let out = colnum(&["zm", "--m", "5", "--mode", "exact", "--emit", "/tmp/never.json"]);
    assert_eq!(code_of(&out), 2);
    assert!(!Path::new("/tmp/never.json").exists());
}

#[test]
fn zm_approx_emits_a_feasible_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("cert.json");
    let out = colnum(&[
        "zm", "--m", "8", "--mode", "approx", "--eps-num", "1.85",
        "--emit", cert_path.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert_eq!(text.lines().next(), Some("293/280"));

    let cache = ArithCache::with_cache_dir(64, None);
    let cert_text = std::fs::read_to_string(&cert_path).unwrap();
    let cert = lp::DualCertificate::from_json(&cert_text, &cache).unwrap();
    assert!(lp::check_dual_feasible(&cert, &cache).unwrap());

    let manifest = manifest_of(&out);
    assert_eq!(manifest["command"], "zm");
    assert_eq!(manifest["artifacts"][0]["path"], cert_path.to_str().unwrap());
}

#[test]
fn threshold_exit_codes_follow_the_verdict() {
    let high = colnum(&["threshold", "--delta", "100000000"]);
    assert_eq!(code_of(&high), 0);
    assert_eq!(stdout_of(&high).trim(), "true");

    let low = colnum(&["threshold", "--delta", "10000"]);
    assert_eq!(code_of(&low), 1);
    assert_eq!(stdout_of(&low).trim(), "false");
}

#[test]
fn claims_reports_match_the_case_analysis() {
    let strict = colnum(&["claims", "--which", "type3", "--d", "3"]);
    assert_eq!(code_of(&strict), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&strict)).unwrap();
    assert_eq!(report["solutions_found"], 0);
    assert_eq!(report["assignments_tested"], 55_728);

    let relaxed = colnum(&[
        "claims", "--which", "type3", "--d", "4", "--relax", "delta-residues",
    ]);
    assert_eq!(code_of(&relaxed), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&relaxed)).unwrap();
    assert_eq!(report["solutions_found"], 54);
    assert_eq!(report["witnesses"][0]["delta"], 2);

    let two = colnum(&["claims", "--which", "type2"]);
    assert_eq!(code_of(&two), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&two)).unwrap();
    assert_eq!(report["solutions_found"], 0);
    assert_eq!(report["assignments_tested"], 9);
}

#[test]
fn claims_usage_errors_exit_two() {
    assert_eq!(code_of(&colnum(&["claims", "--which", "type2", "--d", "3"])), 2);
    assert_eq!(code_of(&colnum(&["claims", "--which", "type3"])), 2);
    assert_eq!(code_of(&colnum(&["claims", "--which", "type4"])), 2);
    let cross = colnum(&["claims", "--which", "type2", "--relax", "delta-residues"]);
    assert_eq!(code_of(&cross), 2);
}

#[test]
fn family_summary_reports_the_member() {
    let out = colnum(&["family", "--kind", "F2", "--delta", "7", "--emit", "summary"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("columns: 10"), "{text}");
    assert!(text.contains("delta endpoints: 7"), "{text}");
    assert!(text.contains("generic: true"), "{text}");
}

#[test]
fn family_columns_roundtrip_through_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let cols = dir.path().join("cols.json");
    let out = colnum(&[
        "family", "--kind", "F1", "--delta", "10", "--emit", "columns",
        "--out", cols.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    let first_sha = artifact_sha(&manifest_of(&out), 0);

    // identical rerun produces the identical artifact
    let again = colnum(&[
        "family", "--kind", "F1", "--delta", "10", "--emit", "columns",
        "--out", cols.to_str().unwrap(),
    ]);
    assert_eq!(artifact_sha(&manifest_of(&again), 0), first_sha);

    let reduced_path = dir.path().join("mab.json");
    let out = colnum(&[
        "reduce", "--input", cols.to_str().unwrap(), "--delta", "10",
        "--output", reduced_path.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let matrix =
        TypedMatrix::from_json(&std::fs::read_to_string(&reduced_path).unwrap()).unwrap();
    assert!(matrix.m() <= 3);
    let cache = ArithCache::with_cache_dir(64, None);
    assert!(matrix.column_count(&cache) >= 12);
    assert!(matrix.delta_endpoints(&cache).unwrap() <= 10);

    // a budget below the set's determinant range is a precondition violation
    let tight = colnum(&[
        "reduce", "--input", cols.to_str().unwrap(), "--delta", "1",
        "--output", dir.path().join("no.json").to_str().unwrap(),
    ]);
    assert_eq!(code_of(&tight), 2);
}

#[test]
fn sweep_csv_is_deterministic_and_certified() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = colnum(&[
        "sweep", "--from", "4", "--to", "40", "--w", "0.999",
        "--out", csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    let first_sha = artifact_sha(&manifest_of(&out), 0);

    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,bound_num,bound_den,solved,eps_num,eps_den,wall_ms"));
    let mut count = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7, "{line}");
        let num: u128 = fields[1].parse().unwrap();
        let den: u128 = fields[2].parse().unwrap();
        assert!(num * 1000 <= 999 * den, "bound above w: {line}");
        assert_eq!(fields[6], "0", "timings are opt-in: {line}");
        count += 1;
    }
    assert_eq!(count, 37);

    let again = colnum(&[
        "sweep", "--from", "4", "--to", "40", "--w", "0.999",
        "--out", csv_path.to_str().unwrap(),
    ]);
    assert_eq!(artifact_sha(&manifest_of(&again), 0), first_sha);

    let timed = colnum(&[
        "sweep", "--from", "4", "--to", "40", "--w", "0.999",
        "--out", csv_path.to_str().unwrap(), "--timings",
    ]);
    assert_eq!(code_of(&timed), 0);
}

#[test]
fn lemma_check_passes_on_the_verified_range_only() {
    let good = colnum(&[
        "numtheory", "check-lemma21", "--eps", "0.001", "--from", "1880", "--to", "1900",
    ]);
    assert_eq!(code_of(&good), 0);
    let text = stdout_of(&good);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,lhs1,rhs1,lhs2,rhs2,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{text}");

    let bad = colnum(&[
        "numtheory", "check-lemma21", "--eps", "0.001", "--from", "1", "--to", "50",
    ]);
    assert_eq!(code_of(&bad), 1);
    assert!(stdout_of(&bad).lines().any(|r| r.ends_with(",false")));
}

#[test]
fn analytic_verdicts_follow_feasibility() {
    let good = colnum(&["analytic", "--m", "3257", "--c", "4.96"]);
    assert_eq!(code_of(&good), 0, "stderr: {}", String::from_utf8_lossy(&good.stderr));
    let text = stdout_of(&good);
    assert!(text.contains("feasible: true"), "{text}");
    assert!(text.contains("objective: "), "{text}");

    let bad = colnum(&["analytic", "--m", "3257", "--c", "1"]);
    assert_eq!(code_of(&bad), 1);
    assert!(stdout_of(&bad).contains("feasible: false"));
}

#[test]
fn oracle_witness_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let witness_path = dir.path().join("witness.json");
    let out = colnum(&[
        "oracle", "--delta", "8", "--m-max", "3", "--emit", witness_path.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let first_sha = artifact_sha(&manifest_of(&out), 0);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witness_path).unwrap()).unwrap();
    assert_eq!(report["delta"], 8);
    assert_eq!(report["count"], 12);
    assert!(report["nodes_explored"].as_u64().unwrap() > 0);
    let witness = TypedMatrix::from_json(&report["witness"].to_string()).unwrap();
    let cache = ArithCache::with_cache_dir(64, None);
    assert_eq!(witness.column_count(&cache), 12);
    assert!(witness.delta_endpoints(&cache).unwrap() <= 8);

    let again = colnum(&[
        "oracle", "--delta", "8", "--m-max", "3", "--emit", witness_path.to_str().unwrap(),
    ]);
    assert_eq!(artifact_sha(&manifest_of(&again), 0), first_sha);
}
