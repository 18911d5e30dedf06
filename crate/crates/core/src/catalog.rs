//! Built-in metric catalog.
//!
//! Entries are addressable by a string id plus a JSON parameter map, which is
//! how scenario files select them. The set spans pseudo-Riemannian metrics
//! (Euclidean, arbitrary-signature pseudo-Euclidean, round sphere chart,
//! Poincaré disk), genuinely Finslerian ones (Randers, Funk, quartic
//! Minkowski), and an intentionally broken entry used as a negative control
//! by the validation suite.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::jets::{Jet, Lagrangian, Scalar};
use crate::metric::MetricDefinition;

/// Ids of the production catalog entries (the broken control is excluded).
pub const CATALOG_IDS: [&str; 7] = [
    "euclidean",
    "pseudo_euclidean",
    "sphere",
    "hyperbolic",
    "randers",
    "funk",
    "quartic",
];

/// Builds a catalog metric from its id and parameter map.
pub fn build(id: &str, params: &Value) -> Result<MetricDefinition> {
    match id {
        "euclidean" => {
            let n = param_dim(params, 2)?;
            Ok(MetricDefinition::new("euclidean", n, Box::new(Euclidean { n })).mark_quadratic())
        }
        "pseudo_euclidean" => {
            let signs = param_signature(params)?;
            let n = signs.len();
            Ok(
                MetricDefinition::new("pseudo_euclidean", n, Box::new(PseudoEuclidean { signs }))
                    .mark_quadratic(),
            )
        }
        "sphere" => Ok(MetricDefinition::new("sphere", 2, Box::new(SphereChart))
            .with_chart(|x| x[0] > 0.0 && x[0] < std::f64::consts::PI)
            .with_sample_box(vec![[0.4, 2.7], [-3.0, 3.0]])
            .mark_quadratic()),
        "hyperbolic" => {
            let n = param_dim(params, 2)?;
            Ok(MetricDefinition::new("hyperbolic", n, Box::new(PoincareDisk { n }))
                .with_chart(|x| sq_norm(x) < 1.0)
                .with_sample_box(vec![[-0.55, 0.55]; n])
                .mark_quadratic())
        }
        "randers" => {
            let base = param_randers_base(params)?;
            let n = param_dim(params, 2)?;
            let beta = param_vec(params, "beta", vec![0.3, 0.0])?;
            if beta.len() != n {
                return Err(Error::Invalid("randers beta length must match dim".into()));
            }
            let beta_norm = sq_norm(&beta).sqrt();
            let limit = match base {
                RandersBase::Euclidean => 1.0,
                RandersBase::Hyperbolic => 2.0,
            };
            if beta_norm >= limit {
                return Err(Error::Invalid(format!(
                    "randers beta must satisfy the norm bound (|beta| = {beta_norm:.3} >= {limit})"
                )));
            }
            let metric = MetricDefinition::new("randers", n, Box::new(Randers { n, base, beta }));
            Ok(match base {
                RandersBase::Euclidean => metric,
                RandersBase::Hyperbolic => metric
                    .with_chart(|x| sq_norm(x) < 1.0)
                    .with_sample_box(vec![[-0.55, 0.55]; n]),
            })
        }
        "funk" => {
            let n = param_dim(params, 2)?;
            Ok(MetricDefinition::new("funk", n, Box::new(Funk { n }))
                .with_chart(|x| sq_norm(x) < 1.0)
                .with_sample_box(vec![[-0.55, 0.55]; n]))
        }
        "quartic" => {
            let n = param_dim(params, 2)?;
            Ok(MetricDefinition::new("quartic", n, Box::new(Quartic { n })))
        }
        "broken" => {
            let n = param_dim(params, 2)?;
            Ok(MetricDefinition::new("broken", n, Box::new(BrokenHomogeneity { n })))
        }
        other => Err(Error::Invalid(format!("unknown metric id '{other}'"))),
    }
}

fn param_dim(params: &Value, default: usize) -> Result<usize> {
    match params.get("dim") {
        None => Ok(default),
        Some(Value::Number(v)) => {
            let n = v
                .as_u64()
                .ok_or_else(|| Error::Invalid("dim must be a positive integer".into()))?;
            if n < 1 || n > 6 {
                return Err(Error::Invalid("dim must be between 1 and 6".into()));
            }
            Ok(n as usize)
        }
        Some(_) => Err(Error::Invalid("dim must be a positive integer".into())),
    }
}

fn param_signature(params: &Value) -> Result<Vec<f64>> {
    match params.get("signature") {
        None => Ok(vec![-1.0, 1.0]),
        Some(Value::Array(items)) => {
            let signs: Option<Vec<f64>> = items.iter().map(|v| v.as_f64()).collect();
            let signs = signs
                .ok_or_else(|| Error::Invalid("signature must be an array of ±1".into()))?;
            if signs.is_empty() || signs.iter().any(|&s| s != 1.0 && s != -1.0) {
                return Err(Error::Invalid("signature entries must be ±1".into()));
            }
            Ok(signs)
        }
        Some(_) => Err(Error::Invalid("signature must be an array of ±1".into())),
    }
}

fn param_vec(params: &Value, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
    match params.get(key) {
        None => Ok(default),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| Error::Invalid(format!("{key} must be a numeric array")))
            })
            .collect(),
        Some(_) => Err(Error::Invalid(format!("{key} must be a numeric array"))),
    }
}

fn param_randers_base(params: &Value) -> Result<RandersBase> {
    match params.get("a").and_then(|v| v.as_str()) {
        None | Some("euclidean") => Ok(RandersBase::Euclidean),
        Some("hyperbolic") => Ok(RandersBase::Hyperbolic),
        Some(other) => Err(Error::Invalid(format!(
            "unknown randers base metric '{other}' (euclidean | hyperbolic)"
        ))),
    }
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

fn sum_sq<S: Scalar>(v: &[S]) -> S {
    let mut acc = v[0].cst(0.0);
    for c in v {
        acc = acc + c.sq();
    }
    acc
}

struct Euclidean {
    n: usize,
}

impl Euclidean {
    fn l<S: Scalar>(_x: &[S], v: &[S]) -> S {
        sum_sq(v)
    }
}

impl Lagrangian for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64 {
        Self::l(x, v)
    }
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet {
        Self::l(x, v)
    }
}

struct PseudoEuclidean {
    signs: Vec<f64>,
}

impl PseudoEuclidean {
    fn l<S: Scalar>(&self, v: &[S]) -> S {
        let mut acc = v[0].cst(0.0);
        for (c, &s) in v.iter().zip(&self.signs) {
            acc = acc + c.sq().scale(s);
        }
        acc
    }
}

impl Lagrangian for PseudoEuclidean {
    fn dim(&self) -> usize {
        self.signs.len()
    }
    fn eval_f64(&self, _x: &[f64], v: &[f64]) -> f64 {
        self.l(v)
    }
    fn eval_jet(&self, _x: &[Jet], v: &[Jet]) -> Jet {
        self.l(v)
    }
}

/// Round sphere in the (θ, φ) chart: `L = v_θ² + sin²θ · v_φ²`.
struct SphereChart;

impl SphereChart {
    fn l<S: Scalar>(x: &[S], v: &[S]) -> S {
        v[0].sq() + x[0].sin().sq() * v[1].sq()
    }
}

impl Lagrangian for SphereChart {
    fn dim(&self) -> usize {
        2
    }
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64 {
        Self::l(x, v)
    }
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet {
        Self::l(x, v)
    }
}

/// Poincaré disk: `L = 4|v|² / (1 − |x|²)²`.
struct PoincareDisk {
    n: usize,
}

impl PoincareDisk {
    fn l<S: Scalar>(x: &[S], v: &[S]) -> S {
        let conf = x[0].cst(1.0) - sum_sq(x);
        sum_sq(v).scale(4.0) / conf.sq()
    }
}

impl Lagrangian for PoincareDisk {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64 {
        Self::l(x, v)
    }
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet {
        Self::l(x, v)
    }
}

#[derive(Clone, Copy)]
enum RandersBase {
    Euclidean,
    Hyperbolic,
}

/// Randers-type metric `L = (√(a(v,v)) + β(v))²` over a Riemannian base `a`.
struct Randers {
    n: usize,
    base: RandersBase,
    beta: Vec<f64>,
}

impl Randers {
    fn l<S: Scalar>(&self, x: &[S], v: &[S]) -> S {
        let a = match self.base {
            RandersBase::Euclidean => sum_sq(v),
            RandersBase::Hyperbolic => {
                let conf = x[0].cst(1.0) - sum_sq(x);
                sum_sq(v).scale(4.0) / conf.sq()
            }
        };
        let mut beta_v = v[0].cst(0.0);
        for (c, &b) in v.iter().zip(&self.beta) {
            beta_v = beta_v + c.scale(b);
        }
        (a.sqrt() + beta_v).sq()
    }
}

impl Lagrangian for Randers {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64 {
        self.l(x, v)
    }
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet {
        self.l(x, v)
    }
}

/// Funk metric of the unit disk, squared:
/// `F = (√((1−|x|²)|v|² + ⟨x,v⟩²) + ⟨x,v⟩) / (1 − |x|²)`, `L = F²`.
struct Funk {
    n: usize,
}

impl Funk {
    fn l<S: Scalar>(x: &[S], v: &[S]) -> S {
        let one = x[0].cst(1.0);
        let conf = one - sum_sq(x);
        let mut xv = x[0].cst(0.0);
        for (a, b) in x.iter().zip(v.iter()) {
            xv = xv + a.clone() * b.clone();
        }
        let q = conf.clone() * sum_sq(v) + xv.sq();
        let f = (q.sqrt() + xv) / conf;
        f.sq()
    }
}

impl Lagrangian for Funk {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64 {
        Self::l(x, v)
    }
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet {
        Self::l(x, v)
    }
}

/// Quartic Minkowski metric `L = √(Σ vᵢ⁴)`; the admissible set excludes the
/// coordinate axes through the nondegeneracy threshold.
struct Quartic {
    n: usize,
}

impl Quartic {
    fn l<S: Scalar>(v: &[S]) -> S {
        let mut acc = v[0].cst(0.0);
        for c in v {
            acc = acc + c.powi(4);
        }
        acc.sqrt()
    }
}

impl Lagrangian for Quartic {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval_f64(&self, _x: &[f64], v: &[f64]) -> f64 {
        Self::l(v)
    }
    fn eval_jet(&self, _x: &[Jet], v: &[Jet]) -> Jet {
        Self::l(v)
    }
}

/// Deliberately non-homogeneous Lagrangian; negative control for audits.
struct BrokenHomogeneity {
    n: usize,
}

impl BrokenHomogeneity {
    fn l<S: Scalar>(v: &[S]) -> S {
        sum_sq(v) + (v[0].sq() * v[0].clone()).scale(0.1)
    }
}

impl Lagrangian for BrokenHomogeneity {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval_f64(&self, _x: &[f64], v: &[f64]) -> f64 {
        Self::l(v)
    }
    fn eval_jet(&self, _x: &[Jet], v: &[Jet]) -> Jet {
        Self::l(v)
    }
}
