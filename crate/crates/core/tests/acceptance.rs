//! Exit-criteria suite: runs every verification check and prints one
//! pass/fail line per criterion. `jlab verify all` runs the same list.

use jlab_core::verify::{format_result, run_all};

#[test]
fn acceptance_criteria() {
    let results = run_all();
    let mut failures = Vec::new();
    for r in &results {
        println!("{}", format_result(r));
        if !r.passed {
            failures.push(format!("criterion {} ({}): {}", r.id, r.name, r.detail));
        }
    }
    assert!(
        failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}
