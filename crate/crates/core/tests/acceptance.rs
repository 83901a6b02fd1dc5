//! One pass/fail line per acceptance criterion.

use direction_space::verify::{run, CRITERIA};

#[test]
fn acceptance() {
    let results: Vec<_> = (1..=CRITERIA).map(run).collect();
    for r in &results {
        println!("{} ({} ms)", r.line(), r.millis);
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{}/{} criteria passed", CRITERIA - failed.len(), CRITERIA);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
