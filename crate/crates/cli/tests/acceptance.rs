//! Acceptance suite: one test per verification criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).
//!
//! Criterion 2 asserts the per-outcome transfer bound exactly as stated,
//! for all four Bell outcomes across the full grid. That claim is violated
//! by the Phi branches, which concentrate entanglement (their qubit-1
//! populations are `(a^2 d^2, b^2 c^2)/n_phi`, so the two input biases
//! counteract; swapping two identical partially entangled pairs makes the
//! Phi branches perfect Bell pairs). The test is kept faithful and
//! therefore fails; its message carries the numbers. The Psi branches and
//! the probability-weighted mean obey the bound everywhere — the mean
//! provably, since measuring {2,3} cannot move the qubit-1 marginal and
//! entropy is concave.

use qcorr_core::selftest::{self, CriterionResult};

fn check(result: CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_worked_example() {
    check(selftest::criterion_1_worked_example());
}

#[test]
fn criterion_02_swap_bound_grid_all_outcomes() {
    check(selftest::criterion_2_swap_bound_grid());
}

#[test]
fn criterion_03_invariant_census() {
    check(selftest::criterion_3_invariant_census());
}

#[test]
fn criterion_04_three_system_identity_and_monotonicity() {
    check(selftest::criterion_4_three_system());
}

#[test]
fn criterion_05_four_system_additivity() {
    check(selftest::criterion_5_four_system());
}

#[test]
fn criterion_06_non_transitivity() {
    check(selftest::criterion_6_non_transitivity());
}

#[test]
fn criterion_07_entropy_inequalities() {
    check(selftest::criterion_7_entropy_inequalities());
}

#[test]
fn criterion_08_cavity_protocol() {
    check(selftest::criterion_8_cavity_protocol());
}

#[test]
fn criterion_09_analytic_vs_generic_swap() {
    check(selftest::criterion_9_oracle_equivalence());
}

#[test]
fn criterion_10_determinism() {
    let row = qcorr_cli::runner::criterion_10_determinism();
    println!(
        "{} criterion {:2} {}: {}",
        if row.passed { "PASS" } else { "FAIL" },
        row.id,
        row.name,
        row.detail
    );
    assert!(row.passed, "{}", row.detail);
}
