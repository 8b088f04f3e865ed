//! `selftest`: the exact invariant suites, one line per suite.

use irand_core::invariants::{run_all, SelftestConfig, SuiteResult};

/// Runs the suites and renders the summary printed by the command.
pub fn selftest(config: &SelftestConfig) -> (Vec<SuiteResult>, String) {
    let results = run_all(config);
    let mut text = String::new();
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status} {:<34} cases={:<7} failures={}\n", r.name, r.cases, r.failures));
        if let Some(first) = &r.first_failure {
            text.push_str(&format!("     first violation: {first}\n"));
        }
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    text.push_str(&format!("{passed}/{} suites passed\n", results.len()));
    (results, text)
}
