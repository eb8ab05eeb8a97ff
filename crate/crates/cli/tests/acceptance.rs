//! The verification suite as a test target: one test per check, each
//! printing its verdict line. A failing check fails its test with the
//! full detail string, so the analysis lands in the test output.

use colnum_cli::acceptance::{self, Check};

fn assert_check(check: Check) {
    println!("{}", check.line());
    assert!(check.pass, "{}", check.detail);
}

#[test]
fn check_01_exact_lp_values() {
    assert_check(acceptance::check_01_exact_lp_values());
}

#[test]
fn check_02_vertex_oracle_agreement() {
    assert_check(acceptance::check_02_vertex_oracle_agreement());
}

#[test]
fn check_03_sweep_certification() {
    assert_check(acceptance::check_03_sweep_certification(1));
}

#[test]
fn check_04_analytic_certificate() {
    assert_check(acceptance::check_04_analytic_certificate());
}

#[test]
fn check_05_totient_estimates() {
    assert_check(acceptance::check_05_totient_estimates());
}

#[test]
fn check_06_family_counts() {
    assert_check(acceptance::check_06_family_counts());
}

#[test]
fn check_07_residue_case_checks() {
    assert_check(acceptance::check_07_residue_case_checks());
}

#[test]
fn check_08_randomized_reduction() {
    assert_check(acceptance::check_08_randomized_reduction(200));
}

#[test]
fn check_09_counting_threshold() {
    assert_check(acceptance::check_09_counting_threshold());
}

#[test]
fn check_10_small_delta_search() {
    assert_check(acceptance::check_10_small_delta_search(1));
}
