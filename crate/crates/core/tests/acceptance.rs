//! The acceptance gate: runs the full invariant suite and prints one
//! verdict line per criterion. The test fails if any criterion fails.

use charfront::validate::{run_all, ValidateParams};

#[test]
fn acceptance_criteria() {
    let results = run_all(&ValidateParams::default());
    assert_eq!(results.len(), 12);
    let mut all_pass = true;
    for r in &results {
        println!(
            "[{:2}] {} {} ({:.2}s): {}",
            r.index,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.seconds,
            r.detail
        );
        all_pass &= r.passed;
    }
    assert!(all_pass, "one or more acceptance criteria failed (see lines above)");
}
