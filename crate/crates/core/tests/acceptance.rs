//! Acceptance suite: every engine-level contract at its pinned tolerance,
//! one pass/fail line per criterion (run with `--nocapture` to see them all;
//! failures always print).
//!
//! The named checks come from the validation registry, which the suite runs
//! once over the whole catalog and then slices per criterion. The CLI
//! determinism contract lives in the CLI crate's own acceptance test.

use std::sync::OnceLock;
use std::time::Instant;

use finsler_core::catalog::CATALOG_IDS;
use finsler_core::validate::{validate, CheckResult, ValidateOptions, ValidationReport};

struct SharedRun {
    report: ValidationReport,
    elapsed_s: f64,
}

fn shared() -> &'static SharedRun {
    static RUN: OnceLock<SharedRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let ids: Vec<String> = CATALOG_IDS.iter().map(|s| s.to_string()).collect();
        let opts = ValidateOptions {
            seed: 7,
            samples: 100,
            tol_override: None,
        };
        let start = Instant::now();
        let report = validate(&ids, &opts).expect("validation run");
        SharedRun {
            report,
            elapsed_s: start.elapsed().as_secs_f64(),
        }
    })
}

fn checks<'a>(report: &'a ValidationReport, suite: &str, check: &str) -> Vec<&'a CheckResult> {
    let found: Vec<&CheckResult> = report
        .results
        .iter()
        .filter(|r| r.suite == suite && r.check == check)
        .collect();
    assert!(
        !found.is_empty(),
        "no check named '{suite}/{check}' in the report"
    );
    found
}

/// Asserts a named check for every metric it ran on, at the criterion's own
/// tolerance (which may be looser than the registry's).
fn assert_checks(report: &ValidationReport, suite: &str, check: &str, tol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for r in checks(report, suite, check) {
        assert!(
            r.error.is_none(),
            "{suite}/{check} [{}] errored: {:?}",
            r.metric,
            r.error
        );
        assert!(
            r.max_residual <= tol,
            "{suite}/{check} [{}]: residual {:.3e} > {tol:.1e}",
            r.metric,
            r.max_residual
        );
        worst = worst.max(r.max_residual);
    }
    worst
}

fn report_line(criterion: &str, worst: f64, pass: bool) {
    println!(
        "acceptance {criterion}: {} (worst residual {worst:.3e})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_metric_identities() {
    let run = shared();
    let mut worst: f64 = 0.0;
    for name in [
        "L 2-homogeneity",
        "g 0-homogeneity",
        "g_v(v,v) = L(v)",
        "Cartan (-1)-homogeneity",
        "Cartan total symmetry",
        "C_v(v,.,.) = 0",
    ] {
        worst = worst.max(assert_checks(&run.report, "metric", name, 1e-8));
    }
    // all seven catalog metrics must be covered
    for id in CATALOG_IDS {
        assert!(
            run.report
                .results
                .iter()
                .any(|r| r.suite == "metric" && r.metric == *id),
            "metric identities missing for {id}"
        );
    }
    report_line("1 metric identities", worst, true);
}

#[test]
fn criterion_2_connection_axioms() {
    let run = shared();
    let mut worst = assert_checks(&run.report, "connection", "torsion freeness", 0.0);
    worst = worst.max(assert_checks(
        &run.report,
        "connection",
        "almost g-compatibility",
        1e-7,
    ));
    worst = worst.max(assert_checks(
        &run.report,
        "connection",
        "Levi-Civita reduction",
        1e-9,
    ));
    report_line("2 connection axioms", worst, true);
}

#[test]
fn criterion_3_geodesics() {
    let run = shared();
    let mut worst = assert_checks(&run.report, "geodesic", "energy conservation", 1e-8);
    worst = worst.max(assert_checks(
        &run.report,
        "geodesic",
        "sphere meridian landmark",
        1e-8,
    ));
    worst = worst.max(assert_checks(&run.report, "geodesic", "flow homogeneity", 1e-8));
    report_line("3 geodesics", worst, true);
}

#[test]
fn criterion_4_variation_formulas() {
    let run = shared();
    let mut worst = assert_checks(
        &run.report,
        "variation",
        "first variation FD agreement",
        1e-6,
    );
    worst = worst.max(assert_checks(
        &run.report,
        "variation",
        "second variation FD agreement",
        1e-5,
    ));
    report_line("4 variation formulas", worst, true);
}

#[test]
fn criterion_5_criticality() {
    let run = shared();
    let worst = assert_checks(
        &run.report,
        "variation",
        "criticality perturbations",
        0.0,
    );
    report_line("5 criticality", worst, true);
}

#[test]
fn criterion_6_curvature_cross_validation() {
    let run = shared();
    let mut worst = assert_checks(&run.report, "curvature", "route agreement", 1e-6);
    worst = worst.max(assert_checks(
        &run.report,
        "curvature",
        "variation independence",
        1e-6,
    ));
    for (check, tol) in [
        ("euclidean flag curvature", 1e-6),
        ("quartic flag curvature", 1e-6),
        ("sphere flag curvature", 1e-6),
        ("hyperbolic flag curvature", 1e-6),
        ("funk flag curvature", 1e-5),
    ] {
        worst = worst.max(assert_checks(&run.report, "curvature", check, tol));
    }
    report_line("6 curvature cross-validation", worst, true);
}

#[test]
fn criterion_7_jacobi_structure() {
    let run = shared();
    let mut worst = assert_checks(&run.report, "jacobi", "geodesic-variation oracle", 1e-5);
    worst = worst.max(assert_checks(&run.report, "jacobi", "dexp FD agreement", 1e-5));
    worst = worst.max(assert_checks(&run.report, "jacobi", "Wronskian constancy", 1e-7));
    worst = worst.max(assert_checks(
        &run.report,
        "jacobi",
        "tangential Jacobi fields",
        1e-6,
    ));
    worst = worst.max(assert_checks(
        &run.report,
        "jacobi",
        "sphere conjugate instant",
        1e-6,
    ));
    worst = worst.max(assert_checks(&run.report, "jacobi", "circle focal instant", 1e-6));
    worst = worst.max(assert_checks(
        &run.report,
        "jacobi",
        "sphere great-circle focal instant",
        1e-6,
    ));
    report_line("7 jacobi structure", worst, true);
}

#[test]
fn criterion_8_index_form() {
    let run = shared();
    let mut worst = assert_checks(&run.report, "variation", "index form symmetry", 1e-7);
    worst = worst.max(assert_checks(&run.report, "variation", "sphere kernel field", 1e-6));
    worst = worst.max(assert_checks(
        &run.report,
        "variation",
        "focal kernel consistency",
        1e-5,
    ));
    worst = worst.max(assert_checks(
        &run.report,
        "submanifold",
        "second-fundamental-form duality",
        1e-7,
    ));
    report_line("8 index form", worst, true);
}

#[test]
fn full_suite_passes_within_budget() {
    let run = shared();
    let failed: Vec<String> = run
        .report
        .results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}/{} [{}]", r.suite, r.check, r.metric))
        .collect();
    assert!(run.report.pass, "failing checks: {failed:?}");
    // the per-criterion runtime budgets sum to under five minutes
    assert!(
        run.elapsed_s < 300.0,
        "validation run took {:.1}s",
        run.elapsed_s
    );
    println!(
        "acceptance summary: {} named checks PASS in {:.1}s",
        run.report.results.len(),
        run.elapsed_s
    );
}
