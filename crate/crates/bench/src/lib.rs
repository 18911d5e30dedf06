//! Shared fixtures for the engine benchmarks.

use finsler_core::catalog;
use finsler_core::metric::MetricDefinition;

/// Metrics worth timing: one quadratic, one genuinely Finslerian.
pub fn bench_metrics() -> Vec<MetricDefinition> {
    ["sphere", "funk"]
        .iter()
        .map(|id| catalog::build(id, &serde_json::Value::Null).unwrap())
        .collect()
}

/// A fixed admissible base point inside every bench metric's chart.
pub fn base_point() -> (Vec<f64>, Vec<f64>) {
    (vec![0.4, 0.2], vec![0.8, 0.55])
}
