//! Acceptance suite: every verification battery at its pinned tolerance,
//! one pass/fail line per criterion, with the stated wall-clock budgets.
//!
//! Budgets are enforced per criterion; a global mutex serialises the
//! batteries so timing is not distorted by parallel test scheduling.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use twolocal_core::battery;
use twolocal_core::residues::Params;

static SERIAL: Mutex<()> = Mutex::new(());

fn run_criterion(
    run: fn(&Params) -> twolocal_core::Result<battery::CriterionReport>,
    budget: Duration,
) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let params = Params::default();
    assert_eq!(params.prec, 16);
    assert_eq!((params.lo, params.hi), (-64, 64));
    assert_eq!(params.threshold, 13);
    let started = Instant::now();
    let rep = run(&params).expect("battery ran");
    let elapsed = started.elapsed();
    println!(
        "criterion {}: {} — {}/{} cases {} in {:?}",
        rep.id,
        rep.name,
        rep.cases_passed,
        rep.cases_run,
        if rep.pass { "PASS" } else { "FAIL" },
        elapsed
    );
    assert!(rep.pass, "criterion {} failures: {:?}", rep.id, rep.failures);
    assert!(
        elapsed <= budget,
        "criterion {} exceeded its budget: {elapsed:?} > {budget:?}",
        rep.id
    );
}

#[test]
fn criterion_1_residue_base_identities() {
    // res(t^j dt) = [j = -1] equal char, -[j = -1] mixed, j in [-5, 5], exact
    run_criterion(battery::battery_residue_identities, Duration::from_secs(1));
}

#[test]
fn criterion_2_parameter_invariance() {
    // 100 random admissible changes per characteristic, p in {2,3,5},
    // N = 16, window [-64, 64]; equal exact, mixed to valuation >= N - 2
    run_criterion(battery::battery_parameter_invariance, Duration::from_secs(30));
}

#[test]
fn criterion_3_functoriality() {
    // unramified deg 2-3, tame e = 2-3, mixed Eisenstein deg 2; 50 random
    // forms each; agreement to valuation >= N - 2
    run_criterion(battery::battery_functoriality, Duration::from_secs(60));
}

#[test]
fn criterion_4_reciprocity() {
    // worked ledgers (+1,-1) and (+2,-2) exact; 200 randomised forms with
    // total valuation >= N - 3 at N = 16
    run_criterion(battery::battery_reciprocity, Duration::from_secs(180));
}

#[test]
fn criterion_5_extension_reciprocity() {
    // 20 randomised forms over each of 3 fixed hypersurface extensions
    run_criterion(battery::battery_extension_reciprocity, Duration::from_secs(120));
}

#[test]
fn criterion_6_different_equals_jacobian() {
    // 12-member battery with exact integer agreement, d = 1 for x^2-p
    // (p odd), d = 3 for x^2-2 over Q_2, d = 0 unramified; floor formula
    // for i in [-2e, 2e]
    run_criterion(battery::battery_different, Duration::from_secs(30));
}

#[test]
fn criterion_7_dualizing_module() {
    // x^2 = t^3 + pt + p for p in {3,5}: members pass, boundaries fail;
    // trivial surface gives W = B dT
    run_criterion(battery::battery_dualizing, Duration::from_secs(120));
}

#[test]
fn criterion_8_residue_field_compatibility() {
    // 50 integral forms over standard mixed fields, exact up to the
    // recorded global sign
    run_criterion(battery::battery_residue_field_compat, Duration::from_secs(10));
}
