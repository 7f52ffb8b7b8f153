//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use cbm_lab::accept::{budget, name, run_criterion, summary_line, SuiteConfig};

const SEED: u64 = 7;

fn run_binary(out: &std::path::Path) -> (bool, Vec<u8>) {
    let status = Command::new(env!("CARGO_BIN_EXE_cbm-lab"))
        .args(["accept", "--seed", &SEED.to_string(), "--output"])
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()
        .expect("cbm-lab runs");
    (status.success(), std::fs::read(out).unwrap_or_default())
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::new(SEED);
    let mut failed = Vec::new();
    for id in 1..=11 {
        let start = Instant::now();
        let report = run_criterion(id, &cfg);
        let elapsed = start.elapsed();
        println!("{}", summary_line(&report, elapsed));
        if !report.pass || budget(id).is_some_and(|b| elapsed > b) {
            failed.push(id);
        }
    }

    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let (ok1, first) = run_binary(&dir.path().join("first.json"));
    let (ok2, second) = run_binary(&dir.path().join("second.json"));
    let same = !first.is_empty() && first == second;
    let pass = ok1 && ok2 && same;
    println!(
        "[{}] 12 {} (accept --seed {SEED} twice: exit 0 both = {}, byte-identical = {same}, {} bytes, {:.2} s)",
        if pass { "PASS" } else { "FAIL" },
        name(12),
        ok1 && ok2,
        first.len(),
        start.elapsed().as_secs_f64()
    );
    if !pass {
        failed.push(12);
    }

    if failed.is_empty() {
        println!("acceptance: 12/12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
