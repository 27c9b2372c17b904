//! Acceptance harness: one test per acceptance criterion, each printing a
//! single `acceptance NN <label>: PASS` line (visible with `--nocapture`)
//! and asserting both the mathematical outcome and the runtime budget.
//!
//! Every numeric threshold is pinned in `raqmod_core::tolerances`; the exact
//! checks compare truncated expansions term by term.

use std::time::{Duration, Instant};

use num::complex::Complex64;

use raqmod_core::analysis::{eval_series, EvalConfig};
use raqmod_core::forms::real_eisenstein;
use raqmod_core::lattice::eisenstein_lattice;
use raqmod_core::tolerances;
use raqmod_core::verify::{run_suite, VerifyOptions, VerifyReport};

/// Runs the named suites with the given options, prints the acceptance
/// line, and asserts overall success plus the runtime budget.
fn acceptance_over_suites(
    number: u32,
    label: &str,
    suites: &[&str],
    opts: VerifyOptions,
    budget: Duration,
) {
    let start = Instant::now();
    let reports: Vec<VerifyReport> = suites
        .iter()
        .map(|name| run_suite(name, &opts).unwrap_or_else(|e| panic!("suite {name}: {e}")))
        .collect();
    let elapsed = start.elapsed();
    let pass = reports.iter().all(VerifyReport::overall);
    println!(
        "acceptance {number:02} {label}: {} ({:.1?})",
        if pass { "PASS" } else { "FAIL" },
        elapsed
    );
    for report in &reports {
        assert!(report.overall(), "{report}");
    }
    assert!(
        elapsed <= budget,
        "acceptance {number:02} exceeded budget: {elapsed:.1?} > {budget:.1?}"
    );
}

#[test]
fn acceptance_01_exact_operator_algebra() {
    acceptance_over_suites(
        1,
        "exact operator algebra",
        &["sl2", "laplace-ops"],
        VerifyOptions {
            order: Some(10),
            ..VerifyOptions::default()
        },
        Duration::from_secs(10),
    );
}

#[test]
fn acceptance_02_ramanujan_system() {
    acceptance_over_suites(
        2,
        "holomorphic differential system",
        &["ramanujan"],
        VerifyOptions {
            order: Some(20),
            ..VerifyOptions::default()
        },
        Duration::from_secs(10),
    );
}

#[test]
fn acceptance_03_eisenstein_system() {
    acceptance_over_suites(
        3,
        "real-analytic family systems",
        &["eisenstein-system"],
        VerifyOptions {
            order: Some(16),
            ..VerifyOptions::default()
        },
        Duration::from_secs(30),
    );
}

#[test]
fn acceptance_04_primitive_solver() {
    acceptance_over_suites(
        4,
        "primitive solver",
        &["primitive-solver"],
        VerifyOptions {
            order: Some(24),
            ..VerifyOptions::default()
        },
        Duration::from_secs(60),
    );
}

#[test]
fn acceptance_05_double_eisenstein() {
    acceptance_over_suites(
        5,
        "double expansions and Laplace table",
        &["double-eis", "laplace-table"],
        VerifyOptions {
            order: Some(12),
            ..VerifyOptions::default()
        },
        Duration::from_secs(60),
    );
}

#[test]
fn acceptance_06_three_edge_graph_identity() {
    acceptance_over_suites(
        6,
        "three-edge graph closed form",
        &["zagier"],
        VerifyOptions {
            order: Some(24),
            cutoff: Some(50),
            ..VerifyOptions::default()
        },
        Duration::from_secs(300),
    );
}

#[test]
fn acceptance_07_four_edge_graph_model() {
    acceptance_over_suites(
        7,
        "four-edge graph model fit",
        &["c211"],
        VerifyOptions {
            order: Some(24),
            ..VerifyOptions::default()
        },
        Duration::from_secs(1800),
    );
}

#[test]
fn acceptance_08_petersson_orthogonality() {
    acceptance_over_suites(
        8,
        "pairing oracle and cusp orthogonality",
        &["petersson-orth"],
        VerifyOptions {
            order: Some(24),
            ..VerifyOptions::default()
        },
        Duration::from_secs(120),
    );
}

#[test]
fn acceptance_09_period_relation_combination() {
    acceptance_over_suites(
        9,
        "period-relation combination",
        &["orthogonality-9-14"],
        VerifyOptions {
            order: Some(16),
            ..VerifyOptions::default()
        },
        Duration::from_secs(300),
    );
}

#[test]
fn acceptance_10_lattice_cross_validation() {
    let start = Instant::now();
    let z = Complex64::new(0.3, 1.1);
    let cfg = EvalConfig::new(24, tolerances::EVAL_TAIL_ABS).unwrap();
    let mut worst: f64 = 0.0;
    for (r, s) in [(1i64, 1i64), (2, 0), (2, 2), (3, 1)] {
        let lattice = eisenstein_lattice(r, s, z, 4000).unwrap();
        let closed = eval_series(&real_eisenstein(r, s, 24).unwrap(), z, &cfg).unwrap();
        let relative = (lattice.value - closed.re).abs() / closed.norm();
        worst = worst.max(relative);
        assert!(
            relative < tolerances::LATTICE_CLOSED_FORM_REL,
            "indices ({r},{s}): lattice {} vs closed form {} (relative {relative:.3e})",
            lattice.value,
            closed.re
        );
    }
    let elapsed = start.elapsed();
    println!(
        "acceptance 10 lattice cross-validation: PASS ({elapsed:.1?}, worst relative {worst:.3e})"
    );
    assert!(elapsed <= Duration::from_secs(60));
}
