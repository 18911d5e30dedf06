//! Task execution: turns a parsed scenario into an output document.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use finsler_core::catalog::CATALOG_IDS;
use finsler_core::curvature::flag_curvature;
use finsler_core::error::Error as CoreError;
use finsler_core::geodesic::{exponential_map, integrate_geodesic, parallel_transport};
use finsler_core::jacobi::{conjugate_points, focal_points, solve_jacobi};
use finsler_core::validate::{validate, ValidateOptions};
use finsler_core::variation::{
    chart_linear_transverse_acceleration, first_variation, index_form, second_variation,
};
use finsler_core::{connection, variation};

use crate::output::TaskOutput;
use crate::scenario::{Scenario, SchemaError, Task};

pub enum RunError {
    Schema(SchemaError),
    Domain(CoreError),
}

impl From<SchemaError> for RunError {
    fn from(e: SchemaError) -> RunError {
        RunError::Schema(e)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> RunError {
        RunError::Domain(e)
    }
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

pub fn execute(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let seed = overrides.seed.or(scenario.seed).unwrap_or(0);
    match scenario.task {
        Task::Validate => run_validate(scenario, seed, overrides),
        Task::Geodesic => run_geodesic(scenario, overrides),
        Task::Exp => run_exp(scenario, overrides),
        Task::Transport => run_transport(scenario, overrides),
        Task::Christoffel => run_christoffel(scenario),
        Task::Flagcurv => run_flagcurv(scenario, seed),
        Task::Jacobi => run_jacobi(scenario, overrides),
        Task::Conjugate => run_conjugate(scenario, overrides),
        Task::Focal => run_focal(scenario, overrides),
        Task::Variation => run_variation(scenario, overrides),
        Task::Indexform => run_indexform(scenario, overrides),
    }
}

fn run_validate(
    scenario: &Scenario,
    seed: u64,
    overrides: &Overrides,
) -> Result<TaskOutput, RunError> {
    let ids: Vec<String> = match &scenario.metrics {
        Some(list) if !list.is_empty() => list.clone(),
        _ => CATALOG_IDS.iter().map(|s| s.to_string()).collect(),
    };
    let opts = ValidateOptions {
        seed,
        samples: scenario.samples.unwrap_or(100),
        tol_override: overrides.tol,
    };
    let report = validate(&ids, &opts)?;
    Ok(TaskOutput::Report(report))
}

fn run_geodesic(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x0 = scenario.need_x0(n)?;
    let v0 = scenario.need_vec(&scenario.v0, "v0", n)?;
    let span = scenario.need_span()?;
    let ode = scenario.ode_options(overrides.tol)?;
    let geo = integrate_geodesic(&m, &x0, &v0, span, &ode)?;
    let points = scenario.output_points.unwrap_or(101).max(2);
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|i| format!("x{i}")));
    columns.extend((1..=n).map(|i| format!("v{i}")));
    columns.push("L".into());
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let t = span[0] + (span[1] - span[0]) * k as f64 / (points - 1) as f64;
        let (x, v) = geo.state(t);
        let l = m.evaluate_unchecked(&x, &v);
        let mut row = vec![t];
        row.extend(x);
        row.extend(v);
        row.push(l);
        rows.push(row);
    }
    Ok(TaskOutput::Table { columns, rows })
}

fn run_exp(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let p = scenario.need_x0(n)?;
    let v = scenario.need_vec(&scenario.v0, "v0", n)?;
    let ode = scenario.ode_options(overrides.tol)?;
    let q = exponential_map(&m, &p, &v, &ode)?;
    let columns = (1..=n).map(|i| format!("x{i}")).collect();
    Ok(TaskOutput::Table {
        columns,
        rows: vec![q],
    })
}

fn run_transport(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let curve = scenario.build_curve(n)?;
    let w0 = scenario.need_vec(&scenario.w, "w", n)?;
    let ode = scenario.ode_options(overrides.tol)?;
    let field = parallel_transport(&m, &curve, &w0, &ode)?;
    let span = curve.span();
    let points = scenario.output_points.unwrap_or(101).max(2);
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|i| format!("w{i}")));
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let t = span[0] + (span[1] - span[0]) * k as f64 / (points - 1) as f64;
        let side = if k == 0 {
            Some(finsler_core::curve::Side::Right)
        } else {
            Some(finsler_core::curve::Side::Left)
        };
        let w = field.value(t, side)?;
        let mut row = vec![t];
        row.extend(w);
        rows.push(row);
    }
    Ok(TaskOutput::Table { columns, rows })
}

fn run_christoffel(scenario: &Scenario) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x = scenario.need_x0(n)?;
    let v = scenario.need_vec(&scenario.v0, "v0", n)?;
    let field = connection::christoffel(&m, &x, &v)?;
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[k][i][j] = field.get(k, i, j);
            }
        }
    }
    Ok(TaskOutput::Json(json!({
        "metric": m.name(),
        "x": x,
        "v": v,
        "gamma": gamma,
    })))
}

fn run_flagcurv(scenario: &Scenario, seed: u64) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x = scenario.x0.clone();
    let mut columns = Vec::new();
    columns.extend((1..=n).map(|i| format!("x{i}")));
    columns.extend((1..=n).map(|i| format!("v{i}")));
    columns.extend((1..=n).map(|i| format!("w{i}")));
    columns.push("K".into());
    let mut rows = Vec::new();
    if let (Some(x), Some(v), Some(w)) = (&x, &scenario.v0, &scenario.w) {
        let k = flag_curvature(&m, x, v, w)?;
        let mut row = Vec::new();
        row.extend(x.clone());
        row.extend(v.clone());
        row.extend(w.clone());
        row.push(k);
        rows.push(row);
    } else {
        // random-flag sweep
        let flags = scenario.samples.unwrap_or(20);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        let mut tries = 0;
        while done < flags && tries < flags * 50 {
            tries += 1;
            let (x, v) = m.sample_admissible(&mut rng)?;
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            match flag_curvature(&m, &x, &v, &w) {
                Ok(k) => {
                    let mut row = Vec::new();
                    row.extend(x);
                    row.extend(v);
                    row.extend(w);
                    row.push(k);
                    rows.push(row);
                    done += 1;
                }
                Err(CoreError::DegenerateFlag { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(TaskOutput::Table { columns, rows })
}

fn run_jacobi(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x0 = scenario.need_x0(n)?;
    let v0 = scenario.need_vec(&scenario.v0, "v0", n)?;
    let span = scenario.need_span()?;
    let j0 = scenario.need_vec(&scenario.j0, "j0", n)?;
    let dj0 = scenario.need_vec(&scenario.dj0, "dj0", n)?;
    let ode = scenario.ode_options(overrides.tol)?;
    let geo = integrate_geodesic(&m, &x0, &v0, span, &ode)?;
    let field = solve_jacobi(&m, &geo, &j0, &dj0, &ode)?;
    let points = scenario.output_points.unwrap_or(101).max(2);
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|i| format!("J{i}")));
    columns.extend((1..=n).map(|i| format!("dJ{i}")));
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let t = span[0] + (span[1] - span[0]) * k as f64 / (points - 1) as f64;
        let mut row = vec![t];
        row.extend(field.value(t));
        row.extend(field.derivative(t));
        rows.push(row);
    }
    Ok(TaskOutput::Table { columns, rows })
}

fn run_conjugate(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x0 = scenario.need_x0(n)?;
    let v0 = scenario.need_vec(&scenario.v0, "v0", n)?;
    let span = scenario.need_span()?;
    let ode = scenario.ode_options(overrides.tol)?;
    let geo = integrate_geodesic(&m, &x0, &v0, span, &ode)?;
    let zeros = conjugate_points(&m, &geo, &ode)?;
    Ok(TaskOutput::Table {
        columns: vec!["t_conjugate".into(), "multiplicity".into()],
        rows: zeros.iter().map(|&(t, m)| vec![t, m as f64]).collect(),
    })
}

fn run_focal(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x0 = scenario.need_x0(n)?;
    let v0 = scenario.need_vec(&scenario.v0, "v0", n)?;
    let span = scenario.need_span()?;
    let patch = scenario.build_patch(&scenario.patch_p, "patch_p")?;
    let ode = scenario.ode_options(overrides.tol)?;
    let geo = integrate_geodesic(&m, &x0, &v0, span, &ode)?;
    let zeros = focal_points(&m, &geo, &patch, &ode)?;
    Ok(TaskOutput::Table {
        columns: vec!["t_focal".into(), "multiplicity".into()],
        rows: zeros.iter().map(|&(t, m)| vec![t, m as f64]).collect(),
    })
}

fn run_variation(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    if scenario.curve.is_some() {
        let curve = scenario.build_curve(n)?;
        let w = scenario.build_field(&scenario.field_w, "field_w", &curve)?;
        let dv = first_variation(&m, &curve, &w)?;
        let energy = variation::energy(&m, &curve)?;
        Ok(TaskOutput::Json(json!({
            "metric": m.name(),
            "energy": energy,
            "first_variation": dv,
        })))
    } else {
        // geodesic base: first and second variation of the chart-linear family
        let x0 = scenario.need_x0(n)?;
        let v0 = scenario.need_vec(&scenario.v0, "v0", n)?;
        let span = scenario.need_span()?;
        let ode = scenario.ode_options(overrides.tol)?;
        let geo = integrate_geodesic(&m, &x0, &v0, span, &ode)?;
        let curve = geo.to_curve();
        let w = scenario.build_field(&scenario.field_w, "field_w", &curve)?;
        let dv = first_variation(&m, &curve, &w)?;
        let acc = chart_linear_transverse_acceleration(&m, &geo, &w)?;
        let d2v = second_variation(&m, &geo, &w, Some(&acc))?;
        Ok(TaskOutput::Json(json!({
            "metric": m.name(),
            "energy": geo.energy,
            "first_variation": dv,
            "second_variation": d2v,
        })))
    }
}

fn run_indexform(scenario: &Scenario, overrides: &Overrides) -> Result<TaskOutput, RunError> {
    let m = scenario.build_metric()?;
    let n = m.dim();
    let x0 = scenario.need_x0(n)?;
    let v0 = scenario.need_vec(&scenario.v0, "v0", n)?;
    let span = scenario.need_span()?;
    let p = scenario.build_patch(&scenario.patch_p, "patch_p")?;
    let q = scenario.build_patch(&scenario.patch_q, "patch_q")?;
    let ode = scenario.ode_options(overrides.tol)?;
    let geo = integrate_geodesic(&m, &x0, &v0, span, &ode)?;
    let curve = geo.to_curve();
    let v_field = scenario.build_field(&scenario.field_v, "field_v", &curve)?;
    let w_field = scenario.build_field(&scenario.field_w, "field_w", &curve)?;
    let value = index_form(&m, &geo, &p, &q, &v_field, &w_field)?;
    Ok(TaskOutput::Json(json!({
        "metric": m.name(),
        "index_form": value,
    })))
}
