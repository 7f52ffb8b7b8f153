use std::process::ExitCode;

use cbm_lab::{run, write_outcome, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Some(n) = std::env::var("CBM_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool that is already initialized keeps its size; nothing else to do
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let outcome = run(&config);
    if let Err(e) = write_outcome(&config, &outcome) {
        eprintln!("cbm-lab: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code as u8)
}
