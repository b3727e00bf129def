//! Acceptance suite: one test per headline claim, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).

use permrep::suite::{self, ClaimOutcome, SuiteConfig};

fn check(outcome: ClaimOutcome) {
    println!("{}", outcome.render_line());
    assert!(
        outcome.pass,
        "criterion {} failed: expected {}, computed {}",
        outcome.id, outcome.expected, outcome.computed
    );
}

fn config() -> SuiteConfig {
    SuiteConfig::default()
}

#[test]
fn criterion_01_gl2_regulator_constants() {
    check(suite::claim_gl2_regulator_constants(&config()));
}

#[test]
fn criterion_02_aff8_regulator_constant() {
    check(suite::claim_aff8_regulator_constant(&config()));
}

#[test]
fn criterion_03_composite_pipeline() {
    check(suite::claim_composite_pipeline(&config()));
}

#[test]
fn criterion_04_star_decompositions() {
    check(suite::claim_star_decompositions(&config()));
}

#[test]
fn criterion_05_split_quaternion_counterexample() {
    check(suite::claim_split_quaternion_counterexample(&config()));
}

#[test]
fn criterion_06_trace_symmetry() {
    check(suite::claim_trace_symmetry(&config()));
}

#[test]
fn criterion_07_local_witnesses() {
    check(suite::claim_local_witnesses(&config()));
}

#[test]
fn criterion_08_surgery_plans() {
    check(suite::claim_surgery_plans(&config()));
}

#[test]
fn criterion_09_cyclic_character_rank() {
    check(suite::claim_cyclic_character_rank(&config()));
}

#[test]
fn criterion_10_surface_round_trip() {
    check(suite::claim_surface_round_trip(&config()));
}

#[test]
fn criterion_11_scope_statement() {
    check(suite::claim_scope_statement(&config()));
}
