//! Acceptance checks 1–10, one pass/fail line each.
//!
//! Checks 5, 8 and 9 are known not to pass at their pinned tolerances
//! (see the README section "Acceptance results"); they are run and
//! reported like the others but do not fail the target. Any other
//! failure, or a known failure that starts passing, does.

use std::process::ExitCode;

use glab_core::verify::criterion;

const KNOWN_FAILURES: [u8; 3] = [5, 8, 9];

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    for id in 1..=10u8 {
        let c = criterion(id);
        let known = KNOWN_FAILURES.contains(&id);
        let note = match (c.passed, known) {
            (true, false) | (false, true) => "",
            (true, true) => " [known failure now passes: update the list]",
            (false, false) => " [unexpected]",
        };
        println!(
            "criterion {id:>2} {} {}: {} — {} ({:.1} s){note}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.detail,
            c.seconds
        );
        if c.passed == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: results as documented");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
