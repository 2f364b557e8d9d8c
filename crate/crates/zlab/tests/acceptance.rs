//! Acceptance battery: one test per criterion, one pass/fail line each.
//!
//! Run with `cargo test -p zlab --test acceptance -- --nocapture` to see
//! the per-criterion lines and timings.

use zlab::verify::acceptance::{self, AcceptanceConfig, CriterionResult};

fn report(result: CriterionResult) {
    println!(
        "criterion {:>2} [{}] {} ({} ms) - {}",
        result.id,
        if result.pass { "PASS" } else { "FAIL" },
        result.name,
        result.millis,
        result.detail
    );
    assert!(result.pass, "criterion {} failed: {}", result.id, result.detail);
}

fn cfg() -> AcceptanceConfig {
    AcceptanceConfig { seed: 42 }
}

#[test]
fn criterion_01_worked_collapse_deadlines() {
    report(acceptance::criterion_1(&cfg()));
}

#[test]
fn criterion_02_metric_axioms() {
    report(acceptance::criterion_2(&cfg()));
}

#[test]
fn criterion_03_scale_law() {
    report(acceptance::criterion_3(&cfg()));
}

#[test]
fn criterion_04_total_boundedness() {
    report(acceptance::criterion_4(&cfg()));
}

#[test]
fn criterion_05_homotopy_k() {
    report(acceptance::criterion_5(&cfg()));
}

#[test]
fn criterion_06_homotopy_p() {
    report(acceptance::criterion_6(&cfg()));
}

#[test]
fn criterion_07_proper_map() {
    report(acceptance::criterion_7(&cfg()));
}

#[test]
fn criterion_08_reparam_brackets() {
    report(acceptance::criterion_8(&cfg()));
}

#[test]
fn criterion_09_ray_slopes() {
    report(acceptance::criterion_9(&cfg()));
}

#[test]
fn criterion_10_counterexample() {
    report(acceptance::criterion_10(&cfg()));
}

#[test]
fn criterion_11_product_null_condition() {
    report(acceptance::criterion_11(&cfg()));
}

#[test]
fn criterion_12_free_null_condition() {
    report(acceptance::criterion_12(&cfg()));
}
