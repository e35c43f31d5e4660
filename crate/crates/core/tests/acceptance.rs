//! Runs every check of the verification suite at its stated tolerance and
//! prints one line per check id. Exits nonzero if any check misbehaves.

use std::process::ExitCode;
use std::time::Instant;

use ab_spectral::verify::{run_check, CheckResult, SuiteConfig, CHECKS};

fn worst(results: &[CheckResult]) -> Option<&CheckResult> {
    // Controls are ranked by how close they come to passing.
    results.iter().max_by(|a, b| {
        let score = |r: &CheckResult| {
            if r.error.is_some() {
                f64::INFINITY
            } else if r.expected_failure {
                r.control_threshold.unwrap_or(r.tolerance) / r.measured
            } else {
                r.measured / r.tolerance
            }
        };
        score(a).total_cmp(&score(b))
    })
}

fn main() -> ExitCode {
    let config = SuiteConfig {
        negative_controls: true,
        ..SuiteConfig::default()
    };
    let mut all_ok = true;
    for (id, description) in CHECKS {
        let start = Instant::now();
        let results = match run_check(id, &config) {
            Ok(r) => r,
            Err(e) => {
                println!("{id:<26} FAIL  configuration error: {e}");
                all_ok = false;
                continue;
            }
        };
        let elapsed = start.elapsed().as_secs_f64();
        let ok = !results.is_empty() && results.iter().all(CheckResult::ok);
        all_ok &= ok;
        let detail = match worst(&results) {
            Some(w) if w.error.is_some() => format!("error {:?} at {:?}", w.error, w.params),
            Some(w) => format!("worst {:.3e} / tol {:.1e}", w.measured, w.tolerance),
            None => "no results".to_string(),
        };
        println!(
            "{id:<26} {}  {:>4} cases  {detail:<36} {elapsed:>7.2}s  {description}",
            if ok { "PASS" } else { "FAIL" },
            results.len()
        );
        for r in results.iter().filter(|r| !r.ok()) {
            println!(
                "    failing: measured {:e} tol {:e} {:?} {:?}",
                r.measured, r.tolerance, r.params, r.error
            );
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
