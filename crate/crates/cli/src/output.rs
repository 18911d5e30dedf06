//! Deterministic CSV/JSON writers.
//!
//! CSV numbers use full-precision scientific notation (17 significant
//! digits) so finite-difference comparisons of runs are reproducible down to
//! the last bit.

use std::fs;
use std::io::Write;

use serde_json::Value;

use finsler_core::validate::ValidationReport;

use crate::scenario::Format;

pub enum TaskOutput {
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<f64>>,
    },
    Json(Value),
    Report(ValidationReport),
}

pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render(output: &TaskOutput, format: Format) -> String {
    match (output, format) {
        (TaskOutput::Table { columns, rows }, Format::Csv) => {
            let mut s = columns.join(",");
            s.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&x| full_precision(x)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        (TaskOutput::Table { columns, rows }, Format::Json) => {
            let v = serde_json::json!({ "columns": columns, "rows": rows });
            let mut s = serde_json::to_string_pretty(&v).unwrap();
            s.push('\n');
            s
        }
        (TaskOutput::Json(v), Format::Json) => {
            let mut s = serde_json::to_string_pretty(v).unwrap();
            s.push('\n');
            s
        }
        (TaskOutput::Json(v), Format::Csv) => {
            // flatten one level of object into a two-column table
            let mut s = String::from("key,value\n");
            if let Value::Object(map) = v {
                for (k, val) in map {
                    match val.as_f64() {
                        Some(x) => s.push_str(&format!("{k},{}\n", full_precision(x))),
                        None => s.push_str(&format!("{k},{val}\n")),
                    }
                }
            }
            s
        }
        (TaskOutput::Report(report), Format::Json) => {
            let mut s = serde_json::to_string_pretty(report).unwrap();
            s.push('\n');
            s
        }
        (TaskOutput::Report(report), Format::Csv) => {
            let mut s = String::from("suite,check,metric,max_residual,tolerance,pass\n");
            for r in &report.results {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.suite,
                    r.check,
                    r.metric,
                    full_precision(r.max_residual),
                    full_precision(r.tolerance),
                    r.pass
                ));
            }
            s
        }
    }
}

/// Writes to a file path or stdout (`-`).
pub fn emit(dest: &str, text: &str) -> std::io::Result<()> {
    if dest == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(dest, text)
    }
}
