//! The acceptance suite, one test per check. Each prints a PASS/FAIL line.

use bergman_core::report::run_check;

const SEED: u64 = 7;

fn check(id: usize) {
    let outcome = run_check(id, SEED).unwrap_or_else(|e| panic!("check {id} errored: {e}"));
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_norm_identity() {
    let start = std::time::Instant::now();
    check(1);
    println!("norm identity ran in {:.2?}", start.elapsed());
}

#[test]
fn criterion_2_closed_form_tensor_oracles() {
    check(2);
}

#[test]
fn criterion_3_fraction_supremum_bracket() {
    check(3);
}

#[test]
fn criterion_4_criterion_decay() {
    check(4);
}

#[test]
fn criterion_5_completeness_probes() {
    check(5);
}

#[test]
fn criterion_6_green_sublevel_mechanism() {
    check(6);
}

#[test]
fn criterion_7_wedge_identities() {
    check(7);
}

#[test]
fn criterion_8_biholomorphic_invariance() {
    check(8);
}
