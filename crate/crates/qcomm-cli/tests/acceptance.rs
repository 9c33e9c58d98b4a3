//! Prints one PASS/FAIL line per acceptance criterion and fails if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use qcomm_cli::acceptance::{run_check, Fault, CRITERIA};

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let check = run_check(id, Fault::None);
        println!("{} ({:.1}s)", check.line(), start.elapsed().as_secs_f64());
        if !check.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
