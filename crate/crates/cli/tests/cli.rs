use std::path::Path;
use std::process::{Command, Output};

use jouanolou::exact::VerificationReport;

const BIN: &str = env!("CARGO_BIN_EXE_jouanolou");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn cli")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = run(&["verify-pb"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["sweep-rp", "--degree", "2", "--p-min", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["trace-w", "--point", "1,2"]).status.code(), Some(2));
}

#[test]
fn small_n_is_flagged_non_certifying() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pb.json");
    let out = run(&["verify-pb", "--n", "10", "--json", p(&path)]);
    let r: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!r.certifying);
    assert!(String::from_utf8_lossy(&out.stdout).contains("non-certifying"));
    // C_10 has counterexamples.
    assert!(!r.holds);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_round_trips_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pb.json");
    run(&["verify-pb", "--n", "70", "--json", p(&path)]);
    let text = std::fs::read_to_string(&path).unwrap();
    let r: VerificationReport = serde_json::from_str(&text).unwrap();
    assert!(r.holds && r.certifying);
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again, text);
    // Large integers are written as decimal strings.
    assert!(text.contains(&format!("\"max_kappa\": \"{}\"", r.max_kappa)));
}

#[test]
fn chunks_merge_to_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.json");
    assert_eq!(run(&["verify-pb", "--n", "70", "--json", p(&full)]).status.code(), Some(0));
    let mut parts = Vec::new();
    for i in 0..3 {
        let part = dir.path().join(format!("part{i}.json"));
        let chunk = format!("{i}/3");
        assert!(run(&["verify-pb", "--n", "70", "--chunk", &chunk, "--json", p(&part)]).status.success());
        parts.push(part);
    }
    let merged = dir.path().join("merged.json");
    let mut args = vec!["merge-reports", "--json", p(&merged)];
    args.extend(parts.iter().map(|x| p(x)));
    assert_eq!(run(&args).status.code(), Some(0));
    let load = |x: &Path| -> VerificationReport { serde_json::from_str(&std::fs::read_to_string(x).unwrap()).unwrap() };
    assert_eq!(load(&merged).without_timing(), load(&full).without_timing());
    // A missing chunk is refused.
    let bad = run(&["merge-reports", p(&parts[0]), p(&parts[1])]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn unwritable_output_is_a_failure() {
    let out = run(&["verify-pb", "--n", "5", "--json", "/nonexistent-dir/pb.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_csv_rows_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "sweep-rp", "--degree", "3", "--p-min", "2", "--p-max", "4", "--steps", "5", "--samples", "300",
            "--seeds", "4", "--seed", "11", "--csv", p(path),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stdout).contains("lower bound"));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("d,p,max_ratio_lower_bound,"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn ppm_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("j.ppm");
    let out = run(&[
        "render-julia", "--degree", "2", "--resolution", "24x16", "--budget", "60", "--slice", "torus:eta=0.6",
        "--out", p(&img),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(&img).unwrap();
    let header = b"P6\n24 16\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 24 * 16 * 3);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("j.json")).unwrap()).unwrap();
    assert_eq!(meta["budget"], 60.0);
    let c = &meta["counts"];
    let total = c["fatou"].as_u64().unwrap() + c["julia"].as_u64().unwrap() + c["failed"].as_u64().unwrap();
    assert_eq!(total, 24 * 16);

    // Same configuration, same picture.
    let img2 = dir.path().join("k.ppm");
    run(&[
        "render-julia", "--degree", "2", "--resolution", "24x16", "--budget", "60", "--slice", "torus:eta=0.6",
        "--out", p(&img2),
    ]);
    assert_eq!(std::fs::read(&img2).unwrap(), bytes);
}

#[test]
fn render_rejects_bad_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("j.ppm");
    let too_big = run(&["render-julia", "--radius", "5", "--resolution", "16x16", "--out", p(&img)]);
    assert_eq!(too_big.status.code(), Some(2));
    let bad_index = run(&["render-julia", "--singularity", "7", "--resolution", "16x16", "--out", p(&img)]);
    assert_eq!(bad_index.status.code(), Some(2));
    let bad_slice = run(&["render-julia", "--slice", "cube", "--resolution", "16x16", "--out", p(&img)]);
    assert_eq!(bad_slice.status.code(), Some(2));
    assert!(!img.exists());
}

#[test]
fn verify_ps_lists_seven_sources() {
    let out = run(&["verify-ps", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["holds"], true);
    let s = v["singularities"].as_array().unwrap();
    assert_eq!(s.len(), 7);
    assert!(s.iter().all(|r| r["is_source_for_w"] == true));
}

#[test]
fn trace_reaches_b() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = run(&["trace-w", "--point", "1,1e-3,-2e-3i", "--csv", p(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"], "FATOU");
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows = text.lines().count() - 1;
    assert_eq!(rows as u64, v["steps"].as_u64().unwrap() + 1);
}

#[test]
fn symmetry_and_report() {
    let out = run(&["symmetry-check", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["group_order"], 21);
    let out = run(&["report", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("N >= 54"));
}

#[test]
fn thread_flag_and_env_agree() {
    let with_flag = run(&["--threads", "2", "verify-pb", "--n", "30"]);
    let with_env = Command::new(BIN)
        .args(["verify-pb", "--n", "30"])
        .env("JOUANOLOU_THREADS", "2")
        .output()
        .unwrap();
    let a: VerificationReport = serde_json::from_slice(&with_flag.stdout).unwrap();
    let b: VerificationReport = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(a.worker_count, 2);
    assert_eq!(b.worker_count, 2);
    assert_eq!(a.without_timing(), b.without_timing());
}
