//! Scenario documents: a self-contained JSON description of one task run.
//!
//! Scenarios carry everything inline (numeric arrays included) so a run is
//! reproducible from the file and the seed alone. Schema violations are
//! reported with stable dotted codes (`span.decreasing`, `metric.unknown`, ...).

use serde::Deserialize;
use serde_json::Value;

use finsler_core::catalog;
use finsler_core::curve::{PiecewiseCurve, VectorFieldAlongCurve};
use finsler_core::metric::MetricDefinition;
use finsler_core::ode::{OdeMethod, OdeOptions};
use finsler_core::submanifold::{
    circle_patch, graph_patch, line_patch, point_patch, sphere_patch, SubmanifoldPatch,
};

/// Schema-level failure with a stable machine-readable code.
#[derive(Debug)]
pub struct SchemaError {
    pub code: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(code: &str, message: impl Into<String>) -> SchemaError {
        SchemaError {
            code: code.into(),
            message: message.into(),
        }
    }
}

pub type SchemaResult<T> = Result<T, SchemaError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Geodesic,
    Exp,
    Transport,
    Christoffel,
    Flagcurv,
    Jacobi,
    Conjugate,
    Focal,
    Variation,
    Indexform,
    Validate,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Geodesic => "geodesic",
            Task::Exp => "exp",
            Task::Transport => "transport",
            Task::Christoffel => "christoffel",
            Task::Flagcurv => "flagcurv",
            Task::Jacobi => "jacobi",
            Task::Conjugate => "conjugate",
            Task::Focal => "focal",
            Task::Variation => "variation",
            Task::Indexform => "indexform",
            Task::Validate => "validate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum MetricSpec {
    Id(String),
    Full {
        id: String,
        #[serde(default)]
        params: Value,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub max_step: Option<f64>,
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSegmentSpec {
    pub ts: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    Samples { segments: Vec<CurveSegmentSpec> },
    Polyline { points: Vec<Vec<f64>>, times: Vec<f64> },
    Line { from: Vec<f64>, to: Vec<f64>, span: [f64; 2] },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSegmentSpec {
    pub ts: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Samples { segments: Vec<FieldSegmentSpec> },
    Constant { value: Vec<f64> },
    /// `amplitude · sin(frequency · π · (t − a)/(b − a))` along the curve.
    Sine { amplitude: Vec<f64>, #[serde(default = "one")] frequency: f64 },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum PatchSpec {
    Point { at: Vec<f64> },
    Line { origin: Vec<f64>, direction: Vec<f64> },
    Circle { center: [f64; 2], radius: f64 },
    Graph { coeffs: Vec<f64> },
    Sphere { center: [f64; 3], radius: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub metric: MetricSpec,
    pub task: Task,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub integrator: Option<IntegratorSpec>,

    // task inputs
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub v0: Option<Vec<f64>>,
    #[serde(default)]
    pub w: Option<Vec<f64>>,
    #[serde(default)]
    pub j0: Option<Vec<f64>>,
    #[serde(default)]
    pub dj0: Option<Vec<f64>>,
    #[serde(default)]
    pub span: Option<[f64; 2]>,
    #[serde(default)]
    pub curve: Option<CurveSpec>,
    #[serde(default)]
    pub field_w: Option<FieldSpec>,
    #[serde(default)]
    pub field_v: Option<FieldSpec>,
    #[serde(default)]
    pub patch_p: Option<PatchSpec>,
    #[serde(default)]
    pub patch_q: Option<PatchSpec>,
    /// Random flags for `flagcurv` sweeps, sample count for `validate`.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Output rows for trajectory tasks.
    #[serde(default)]
    pub output_points: Option<usize>,
    /// Metric ids for `validate`.
    #[serde(default)]
    pub metrics: Option<Vec<String>>,
}

impl Scenario {
    pub fn parse(text: &str) -> SchemaResult<Scenario> {
        serde_json::from_str(text).map_err(|e| SchemaError::new("schema.parse", e.to_string()))
    }

    pub fn build_metric(&self) -> SchemaResult<MetricDefinition> {
        let (id, params) = match &self.metric {
            MetricSpec::Id(id) => (id.as_str(), Value::Null),
            MetricSpec::Full { id, params } => (id.as_str(), params.clone()),
        };
        catalog::build(id, &params).map_err(|e| {
            let code = if e.to_string().contains("unknown metric") {
                "metric.unknown"
            } else {
                "metric.params"
            };
            SchemaError::new(code, e.to_string())
        })
    }

    pub fn ode_options(&self, tol_override: Option<f64>) -> SchemaResult<OdeOptions> {
        let mut opts = OdeOptions::default();
        if let Some(spec) = &self.integrator {
            if let Some(r) = spec.rel_tol {
                opts.rel_tol = r;
            }
            if let Some(a) = spec.abs_tol {
                opts.abs_tol = a;
            }
            if let Some(h) = spec.max_step {
                if !(h > 0.0) {
                    return Err(SchemaError::new("integrator.max_step", "max_step must be positive"));
                }
                opts.max_step = h;
            }
            match spec.method.as_deref() {
                None | Some("rkf45") => {}
                Some("rk4") => {
                    let step = spec.step.ok_or_else(|| {
                        SchemaError::new("integrator.step", "rk4 requires a step")
                    })?;
                    opts.method = OdeMethod::Rk4 { step };
                }
                Some(other) => {
                    return Err(SchemaError::new(
                        "integrator.method",
                        format!("unknown method '{other}' (rkf45 | rk4)"),
                    ))
                }
            }
        }
        if let Some(t) = tol_override {
            opts.rel_tol = t;
        }
        Ok(opts)
    }

    pub fn need_x0(&self, dim: usize) -> SchemaResult<Vec<f64>> {
        let x0 = self
            .x0
            .clone()
            .ok_or_else(|| SchemaError::new("x0.missing", "task requires x0"))?;
        if x0.len() != dim {
            return Err(SchemaError::new(
                "x0.dim",
                format!("x0 has {} components, metric dim is {dim}", x0.len()),
            ));
        }
        Ok(x0)
    }

    pub fn need_vec(&self, field: &Option<Vec<f64>>, name: &str, dim: usize) -> SchemaResult<Vec<f64>> {
        let v = field
            .clone()
            .ok_or_else(|| SchemaError::new(&format!("{name}.missing"), format!("task requires {name}")))?;
        if v.len() != dim {
            return Err(SchemaError::new(
                &format!("{name}.dim"),
                format!("{name} has {} components, metric dim is {dim}", v.len()),
            ));
        }
        Ok(v)
    }

    pub fn need_span(&self) -> SchemaResult<[f64; 2]> {
        let span = self
            .span
            .ok_or_else(|| SchemaError::new("span.missing", "task requires a span"))?;
        if !(span[1] > span[0]) {
            return Err(SchemaError::new(
                "span.decreasing",
                format!("span [{}, {}] is not increasing", span[0], span[1]),
            ));
        }
        Ok(span)
    }

    pub fn build_curve(&self, dim: usize) -> SchemaResult<PiecewiseCurve> {
        let spec = self
            .curve
            .as_ref()
            .ok_or_else(|| SchemaError::new("curve.missing", "task requires a curve"))?;
        build_curve(spec, dim)
    }

    pub fn build_field(
        &self,
        spec: &Option<FieldSpec>,
        name: &str,
        curve: &PiecewiseCurve,
    ) -> SchemaResult<VectorFieldAlongCurve> {
        let spec = spec
            .as_ref()
            .ok_or_else(|| SchemaError::new(&format!("{name}.missing"), format!("task requires {name}")))?;
        build_field(spec, curve)
    }

    pub fn build_patch(&self, spec: &Option<PatchSpec>, name: &str) -> SchemaResult<SubmanifoldPatch> {
        let spec = spec
            .as_ref()
            .ok_or_else(|| SchemaError::new(&format!("{name}.missing"), format!("task requires {name}")))?;
        Ok(build_patch(spec))
    }
}

pub fn build_curve(spec: &CurveSpec, dim: usize) -> SchemaResult<PiecewiseCurve> {
    let curve = match spec {
        CurveSpec::Samples { segments } => {
            if segments.is_empty() {
                return Err(SchemaError::new("curve.segments", "curve needs at least one segment"));
            }
            let parts: Vec<(Vec<f64>, Vec<Vec<f64>>)> = segments
                .iter()
                .map(|s| (s.ts.clone(), s.points.clone()))
                .collect();
            PiecewiseCurve::from_segment_samples(&parts)
        }
        CurveSpec::Polyline { points, times } => {
            if points.len() != times.len() || points.len() < 2 {
                return Err(SchemaError::new(
                    "curve.polyline",
                    "polyline needs matching points and times, at least two",
                ));
            }
            let parts: Vec<(Vec<f64>, Vec<Vec<f64>>)> = points
                .windows(2)
                .zip(times.windows(2))
                .map(|(pts, tt)| {
                    let samples = 64usize;
                    let ts: Vec<f64> = (0..=samples)
                        .map(|k| tt[0] + (tt[1] - tt[0]) * k as f64 / samples as f64)
                        .collect();
                    let ys: Vec<Vec<f64>> = ts
                        .iter()
                        .map(|&t| {
                            let f = (t - tt[0]) / (tt[1] - tt[0]);
                            pts[0]
                                .iter()
                                .zip(&pts[1])
                                .map(|(a, b)| a + (b - a) * f)
                                .collect()
                        })
                        .collect();
                    (ts, ys)
                })
                .collect();
            PiecewiseCurve::from_segment_samples(&parts)
        }
        CurveSpec::Line { from, to, span } => {
            let (from, to, span) = (from.clone(), to.clone(), *span);
            if !(span[1] > span[0]) {
                return Err(SchemaError::new("span.decreasing", "curve span is not increasing"));
            }
            PiecewiseCurve::from_closure(span, move |t| {
                let f = (t - span[0]) / (span[1] - span[0]);
                from.iter().zip(&to).map(|(a, b)| a + (b - a) * f).collect()
            })
        }
    }
    .map_err(|e| SchemaError::new("curve.invalid", e.to_string()))?;
    if curve.dim() != dim {
        return Err(SchemaError::new(
            "curve.dim",
            format!("curve has {} components, metric dim is {dim}", curve.dim()),
        ));
    }
    Ok(curve)
}

pub fn build_field(spec: &FieldSpec, curve: &PiecewiseCurve) -> SchemaResult<VectorFieldAlongCurve> {
    match spec {
        FieldSpec::Samples { segments } => {
            let parts: Vec<(Vec<f64>, Vec<Vec<f64>>)> = segments
                .iter()
                .map(|s| (s.ts.clone(), s.values.clone()))
                .collect();
            VectorFieldAlongCurve::from_segment_samples(&parts)
        }
        FieldSpec::Constant { value } => VectorFieldAlongCurve::constant(curve, value),
        FieldSpec::Sine { amplitude, frequency } => {
            let span = curve.span();
            let amp = amplitude.clone();
            let freq = *frequency;
            VectorFieldAlongCurve::from_closure(curve, move |t| {
                let tau = (t - span[0]) / (span[1] - span[0]);
                let s = (freq * std::f64::consts::PI * tau).sin();
                amp.iter().map(|a| a * s).collect()
            })
        }
    }
    .map_err(|e| SchemaError::new("field.invalid", e.to_string()))
}

pub fn build_patch(spec: &PatchSpec) -> SubmanifoldPatch {
    match spec {
        PatchSpec::Point { at } => point_patch(at.clone()),
        PatchSpec::Line { origin, direction } => line_patch(origin.clone(), direction.clone()),
        PatchSpec::Circle { center, radius } => circle_patch(*center, *radius),
        PatchSpec::Graph { coeffs } => graph_patch(coeffs.clone()),
        PatchSpec::Sphere { center, radius } => sphere_patch(*center, *radius),
    }
}
