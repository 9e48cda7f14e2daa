//! Acceptance battery: every criterion at full tolerance, one line each.
//! Run with `cargo test --test acceptance -- --nocapture` to see the report.

use std::process::Command;

use schwarzian_lab::verify::{run_suite, SuiteConfig, SuiteMode, CRITERIA};

#[test]
fn acceptance_criteria() {
    let results = run_suite(&SuiteConfig::new(SuiteMode::Full));
    assert_eq!(results.len(), CRITERIA.len());
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2}: {}: {}", r.id, r.name, r.detail);
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn criterion_12_cli_koebe_control() {
    let out = Command::new(env!("CARGO_BIN_EXE_schwarzian-lab"))
        .args(["--no-timing", "classify", "--function", "z/(1-z)^2", "--class", "starlike", "--order", "0.5"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    let witness = &report["results"]["witness"];
    let ok = out.status.code() == Some(1) && witness[0].as_f64().is_some_and(|re| re < 0.0);
    println!("[{}] criterion 12 (cli): Koebe vs starlike order 0.5 exits 1 with witness {witness}", if ok { "PASS" } else { "FAIL" });
    assert!(ok);
}
