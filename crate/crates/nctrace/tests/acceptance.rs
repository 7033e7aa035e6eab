//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! table; the CLI `verify` subcommand drives the same criteria.

use nctrace::acceptance::run_one;

const SEED: u64 = 20240;

fn check(id: usize) {
    let out = run_one(id, SEED, 1.0);
    println!("{}", out.line());
    assert!(out.passed, "{}", out.line());
}

#[test]
fn criterion_01_magic_formula_exactness() {
    check(1);
}

#[test]
fn criterion_02_symbolic_identity_suite() {
    check(2);
}

#[test]
fn criterion_03_finite_difference_consistency() {
    check(3);
}

#[test]
fn criterion_04_asymptotic_laplacian() {
    check(4);
}

#[test]
fn criterion_05_exact_semigroup_backend() {
    check(5);
}

#[test]
fn criterion_06_semicircle_law() {
    check(6);
}

#[test]
fn criterion_07_dyson_schwinger_residuals() {
    check(7);
}

#[test]
fn criterion_08_quartic_oracle_match() {
    check(8);
}

#[test]
fn criterion_09_mc_semigroup_closed_form() {
    check(9);
}

#[test]
fn criterion_10_derivative_of_expectation() {
    check(10);
}

#[test]
fn criterion_11_transport_end_to_end() {
    check(11);
}

#[test]
fn criterion_12_triangular_transport() {
    check(12);
}
