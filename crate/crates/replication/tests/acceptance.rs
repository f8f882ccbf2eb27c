//! Acceptance criteria on the bundled dataset, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed, passing or
//! not. Exits non-zero when any criterion fails.

use std::process::ExitCode;

use sri_core::io::bundled_matrix;
use sri_replication::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    // `cargo test -- <filter>` passes extra arguments; honour a numeric filter.
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let matrix = match bundled_matrix() {
        Ok(m) => m,
        Err(e) => {
            println!("acceptance: bundled dataset failed to load: {e}");
            return ExitCode::FAILURE;
        }
    };

    let mut failed = Vec::new();
    let mut ran = 0;
    for (id, _) in CRITERIA.iter().filter(|(id, _)| only.is_empty() || only.contains(id)) {
        let c = run_criterion(*id, &matrix);
        println!("{}", c.summary_line());
        for miss in c.failures() {
            println!("    {miss}");
        }
        if let Some(note) = &c.note {
            println!("    note: {note}");
        }
        ran += 1;
        if !c.passed() {
            failed.push(*id);
        }
    }

    println!("\nacceptance: {}/{ran} criteria pass", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        ExitCode::FAILURE
    }
}
