//! Named-check validation suite over the metric catalog.
//!
//! Each property of the engine appears here exactly once as a named check
//! with a pinned tolerance. The CLI `validate` task and the acceptance test
//! suite both drive this module; checks for one metric run independently of
//! other metrics, so the driver parallelizes across metrics and reassembles
//! the report in deterministic order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::connection::{self, christoffel_s, spray_s};
use crate::curvature::{
    flag_curvature, flag_curvature_variational, jacobi_operator_spray,
    jacobi_operator_variational, jacobi_operator_variational_fd, VariationSurface,
};
use crate::curve::{PiecewiseCurve, Side, VectorFieldAlongCurve};
use crate::error::{Error, Result};
use crate::fd;
use crate::geodesic::{integrate_geodesic, parallel_transport, GeodesicRecord};
use crate::jacobi::{
    conjugate_points, focal_points, p_jacobi_basis, parallel_frame,
    solve_jacobi, wronskian,
};
use crate::jets::{lift, Dir, Jet, Lagrangian, Scalar};
use crate::metric::MetricDefinition;
use crate::ode::OdeOptions;
use crate::submanifold::{self, circle_patch, line_patch, point_patch, sphere_patch};
use crate::variation::{
    chart_linear_transverse_acceleration, critical_point_test, energy_first_fd,
    energy_second_fd, first_variation, index_form_with, second_variation_with,
    GeodesicQuadrature,
};

/// One named check with its worst observed residual.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub check: String,
    pub metric: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Full report of a validation run.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub samples: usize,
    pub results: Vec<CheckResult>,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Sample count for the metric-identity sweeps.
    pub samples: usize,
    /// Replaces every check tolerance when set.
    pub tol_override: Option<f64>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            seed: 7,
            samples: 100,
            tol_override: None,
        }
    }
}

fn run_check(
    suite: &str,
    check: &str,
    metric: &str,
    tolerance: f64,
    opts: &ValidateOptions,
    f: impl FnOnce() -> Result<f64>,
) -> CheckResult {
    let tolerance = opts.tol_override.unwrap_or(tolerance);
    match f() {
        Ok(max_residual) => CheckResult {
            suite: suite.into(),
            check: check.into(),
            metric: metric.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            error: None,
        },
        Err(e) => CheckResult {
            suite: suite.into(),
            check: check.into(),
            metric: metric.into(),
            max_residual: f64::NAN,
            tolerance,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every named check for the given catalog ids. Checks tied to a fixed
/// geometry (sphere conjugate instants, circle focal instants, Funk flag
/// value, ...) run when their metric id is in the list.
pub fn validate(ids: &[String], opts: &ValidateOptions) -> Result<ValidationReport> {
    for id in ids {
        // fail early on unknown ids
        catalog::build(id, &serde_json::Value::Null)?;
    }
    let mut results: Vec<CheckResult> = vec![jets_polynomial_check(opts)];

    let per_metric: Vec<Vec<CheckResult>> = {
        use rayon::prelude::*;
        ids.par_iter()
            .enumerate()
            .map(|(idx, id)| metric_checks(id, opts.seed.wrapping_add(idx as u64), opts))
            .collect()
    };
    for block in per_metric {
        results.extend(block);
    }
    let pass = results.iter().all(|r| r.pass);
    Ok(ValidationReport {
        seed: opts.seed,
        samples: opts.samples,
        results,
        pass,
    })
}

fn metric_checks(id: &str, seed: u64, opts: &ValidateOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let m = match catalog::build(id, &serde_json::Value::Null) {
        Ok(m) => m,
        Err(e) => {
            out.push(CheckResult {
                suite: "catalog".into(),
                check: "build".into(),
                metric: id.into(),
                max_residual: f64::NAN,
                tolerance: 0.0,
                pass: false,
                error: Some(e.to_string()),
            });
            return out;
        }
    };

    out.extend(metric_identity_checks(&m, seed, opts));
    out.push(jets_fd_check(&m, seed, opts));
    out.extend(connection_checks(&m, seed, opts));
    out.extend(geodesic_checks(&m, seed, opts));
    out.extend(curvature_checks(&m, seed, opts));
    out.extend(variation_checks(&m, seed, opts));
    out.extend(submanifold_checks(&m, seed, opts));
    out.extend(jacobi_checks(&m, seed, opts));
    out.extend(fixed_geometry_checks(id, seed, opts));
    out
}

// ---------------------------------------------------------------------------
// samplers

fn sample_unit(m: &MetricDefinition, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, Vec<f64>)> {
    for _ in 0..100 {
        let (x, v) = m.sample_admissible(rng)?;
        let l = m.evaluate_unchecked(&x, &v).abs();
        if l > 1e-3 {
            let s = 1.0 / l.sqrt();
            let vu: Vec<f64> = v.iter().map(|c| c * s).collect();
            if m.is_admissible(&x, &vu) {
                return Ok((x, vu));
            }
        } else {
            return Ok((x, v));
        }
    }
    Err(Error::Invalid(format!(
        "could not sample a unit-speed admissible vector for '{}'",
        m.name()
    )))
}

fn sample_geodesic(
    m: &MetricDefinition,
    rng: &mut ChaCha8Rng,
    len: f64,
    ode: &OdeOptions,
) -> Result<GeodesicRecord> {
    for _ in 0..60 {
        let (x, v) = sample_unit(m, rng)?;
        match integrate_geodesic(m, &x, &v, [0.0, len], ode) {
            Ok(g) => return Ok(g),
            Err(Error::DomainExit { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Invalid(format!(
        "could not sample a geodesic of length {len} for '{}'",
        m.name()
    )))
}

/// Random smooth curve with admissible velocities, resampled until valid.
fn sample_curve(
    m: &MetricDefinition,
    rng: &mut ChaCha8Rng,
    span: [f64; 2],
) -> Result<PiecewiseCurve> {
    let n = m.dim();
    'outer: for _ in 0..80 {
        let (x0, v0) = sample_unit(m, rng)?;
        let amp: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..0.08)).collect();
        let freq: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..3.0)).collect();
        let phase: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        let x0c = x0.clone();
        let v0c = v0.clone();
        let curve = PiecewiseCurve::from_closure(span, move |t| {
            (0..n)
                .map(|i| {
                    x0c[i] + v0c[i] * (t - span[0]) * 0.5
                        + amp[i] * ((freq[i] * t + phase[i]).sin() - phase[i].sin())
                })
                .collect()
        })?;
        // keep only curves whose velocity stays admissible
        for k in 0..=24 {
            let t = span[0] + (span[1] - span[0]) * k as f64 / 24.0;
            let x = curve.position(t, Some(Side::Left))?;
            let v = curve.velocity(t, Some(Side::Left))?;
            if !m.is_admissible(&x, &v) {
                continue 'outer;
            }
        }
        return Ok(curve);
    }
    Err(Error::Invalid(format!(
        "could not sample an admissible curve for '{}'",
        m.name()
    )))
}

/// Random smooth field along a curve, amplitude O(0.3).
fn sample_field(
    curve: &PiecewiseCurve,
    rng: &mut ChaCha8Rng,
    dim: usize,
) -> Result<VectorFieldAlongCurve> {
    let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let f: Vec<f64> = (0..dim).map(|_| rng.gen_range(1.0..3.0)).collect();
    VectorFieldAlongCurve::from_closure(curve, move |t| {
        (0..dim)
            .map(|i| a[i] + b[i] * t + c[i] * (f[i] * t).sin())
            .collect()
    })
}

/// Random admissible reference field: a wobble around the curve velocity.
fn sample_reference(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    rng: &mut ChaCha8Rng,
) -> Result<VectorFieldAlongCurve> {
    'outer: for _ in 0..40 {
        let amp = rng.gen_range(0.05..0.2);
        let freq = rng.gen_range(1.0..3.0);
        let span = curve.span();
        let samples: Vec<(f64, Vec<f64>)> = (0..=64)
            .map(|k| {
                let t = span[0] + (span[1] - span[0]) * k as f64 / 64.0;
                let v = curve.velocity(t, Some(Side::Left)).unwrap();
                let w: Vec<f64> = v
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c * (1.0 + amp * (freq * t + i as f64).sin()))
                    .collect();
                (t, w)
            })
            .collect();
        let ts: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
        let ys: Vec<Vec<f64>> = samples.into_iter().map(|(_, y)| y).collect();
        let field = VectorFieldAlongCurve::from_segment_samples(&[(ts, ys)])?;
        for k in 0..=24 {
            let t = span[0] + (span[1] - span[0]) * k as f64 / 24.0;
            let x = curve.position(t, Some(Side::Left))?;
            let w = field.value(t, Some(Side::Left))?;
            if !m.is_admissible(&x, &w) {
                continue 'outer;
            }
        }
        return Ok(field);
    }
    Err(Error::Invalid("no admissible reference field".into()))
}

// ---------------------------------------------------------------------------
// jets

/// Random polynomial Lagrangian with exact analytic derivatives.
struct PolyLagrangian {
    terms: Vec<(f64, [u8; 4])>,
}

impl PolyLagrangian {
    fn random(rng: &mut ChaCha8Rng) -> PolyLagrangian {
        let mut terms = Vec::new();
        for _ in 0..6 {
            let mut e = [0u8; 4];
            let mut total = 0u8;
            for slot in &mut e {
                let cap = 4 - total;
                let p = rng.gen_range(0..=cap.min(2));
                *slot = p;
                total += p;
            }
            terms.push((rng.gen_range(-2.0..2.0), e));
        }
        PolyLagrangian { terms }
    }

    fn eval_generic<S: Scalar>(&self, x: &[S], v: &[S]) -> S {
        let mut acc = x[0].cst(0.0);
        for &(c, e) in &self.terms {
            let mut t = x[0].cst(c);
            let vars = [&x[0], &x[1], &v[0], &v[1]];
            for (var, &p) in vars.iter().zip(e.iter()) {
                if p > 0 {
                    t = t * var.powi(p as i32);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Exact mixed partial by term-wise differentiation.
    fn exact_partial(&self, x: &[f64], v: &[f64], alpha: [u8; 4]) -> f64 {
        let vars = [x[0], x[1], v[0], v[1]];
        let mut acc = 0.0;
        'term: for &(c, e) in &self.terms {
            let mut coef = c;
            let mut exps = e;
            for k in 0..4 {
                for _ in 0..alpha[k] {
                    if exps[k] == 0 {
                        continue 'term;
                    }
                    coef *= exps[k] as f64;
                    exps[k] -= 1;
                }
            }
            let mut value = coef;
            for k in 0..4 {
                value *= vars[k].powi(exps[k] as i32);
            }
            acc += value;
        }
        acc
    }
}

impl Lagrangian for PolyLagrangian {
    fn dim(&self) -> usize {
        2
    }
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64 {
        self.eval_generic(x, v)
    }
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet {
        self.eval_generic(x, v)
    }
}

fn jets_polynomial_check(opts: &ValidateOptions) -> CheckResult {
    run_check("jets", "polynomial exactness", "-", 1e-12, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6a65_7473);
        let mut worst: f64 = 0.0;
        let dir_sets: Vec<Vec<Dir>> = vec![
            vec![Dir::V(0)],
            vec![Dir::V(0), Dir::V(1)],
            vec![Dir::X(0), Dir::V(1)],
            vec![Dir::X(0), Dir::X(1), Dir::V(0)],
            vec![Dir::X(0), Dir::X(1), Dir::V(0), Dir::V(1)],
        ];
        for _ in 0..20 {
            let poly = PolyLagrangian::random(&mut rng);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            for dirs in &dir_sets {
                let order = 4usize.min(5 - dirs.len() + 1).min(4 - (dirs.len().saturating_sub(1)));
                let order = order.max(1);
                let lifted = lift(&poly, &x[..], &v[..], dirs, order)?;
                // enumerate a few multi-indices within the order
                let mut alphas: Vec<Vec<usize>> = vec![vec![0; dirs.len()]];
                for (k, _) in dirs.iter().enumerate() {
                    let mut a = vec![0; dirs.len()];
                    a[k] = 1;
                    alphas.push(a.clone());
                    if order >= 2 {
                        a[k] = 2;
                        alphas.push(a);
                    }
                }
                if dirs.len() >= 2 && order >= 2 {
                    let mut a = vec![0; dirs.len()];
                    a[0] = 1;
                    a[1] = 1;
                    alphas.push(a);
                }
                for alpha in alphas {
                    if alpha.iter().sum::<usize>() > order {
                        continue;
                    }
                    let got = lifted.partial(&alpha);
                    let mut full = [0u8; 4];
                    for (k, d) in dirs.iter().enumerate() {
                        let slot = match d {
                            Dir::X(i) => *i,
                            Dir::V(i) => 2 + *i,
                        };
                        full[slot] += alpha[k] as u8;
                    }
                    let expect = poly.exact_partial(&x, &v, full);
                    worst = worst.max((got - expect).abs());
                }
            }
        }
        Ok(worst)
    })
}

fn jets_fd_check(m: &MetricDefinition, seed: u64, opts: &ValidateOptions) -> CheckResult {
    run_check(
        "jets",
        "catalog derivatives vs Richardson FD",
        m.name(),
        1e-6,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfd);
            let n = m.dim();
            let mut worst: f64 = 0.0;
            // finite differences of 3rd/4th order need well-conditioned base
            // points: resample until the fundamental tensor has a healthy
            // determinant margin, and normalize v so derivative magnitudes
            // stay O(1)
            let margined = |rng: &mut ChaCha8Rng| -> Result<(Vec<f64>, Vec<f64>)> {
                for _ in 0..300 {
                    let (x, v) = m.sample_admissible(rng)?;
                    let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let vu: Vec<f64> = v.iter().map(|c| c / norm).collect();
                    if let Ok(g) = m.fundamental_tensor(&x, &vu) {
                        let gn = (0..n)
                            .map(|i| (0..n).map(|j| g.matrix()[(i, j)].abs()).sum::<f64>())
                            .fold(0.0f64, f64::max);
                        if g.det().abs() >= 0.05 * gn.powi(n as i32) {
                            return Ok((x, vu));
                        }
                    }
                }
                Err(Error::Invalid("no well-conditioned sample".into()))
            };
            let cases: Vec<(Vec<Dir>, Vec<usize>, f64)> = vec![
                (vec![Dir::V(0)], vec![1], 1e-4),
                (vec![Dir::V(0)], vec![2], 1e-3),
                (vec![Dir::V(0), Dir::V(1 % n)], vec![1, 1], 1e-3),
                (vec![Dir::V(0), Dir::X(0)], vec![2, 1], 1e-2),
                (vec![Dir::V(0), Dir::V(1 % n)], vec![2, 2], 1e-2),
                (vec![Dir::X(0), Dir::V(0), Dir::V(1 % n)], vec![1, 2, 1], 1e-2),
            ];
            let mut accepted = 0usize;
            for _ in 0..10 {
                let (x, v) = margined(&mut rng)?;
                for (dirs, alpha, h) in &cases {
                    if dirs.len() > 1 && n < 2 {
                        continue;
                    }
                    let order: usize = alpha.iter().sum();
                    let lifted = lift(m.lagrangian(), &x[..], &v[..], dirs, order)?;
                    let got = lifted.partial(alpha);
                    // FD over the packed (x, v) variables
                    let packed: Vec<f64> = x.iter().chain(v.iter()).cloned().collect();
                    let mut full = vec![0usize; 2 * n];
                    for (k, d) in dirs.iter().enumerate() {
                        match d {
                            Dir::X(i) => full[*i] += alpha[k],
                            Dir::V(i) => full[n + *i] += alpha[k],
                        }
                    }
                    let f = |z: &[f64]| m.evaluate_unchecked(&z[..n], &z[n..]);
                    let coarse = fd::mixed_partial(&f, &packed, &full, *h);
                    let fine = fd::mixed_partial(&f, &packed, &full, *h / 2.0);
                    let scale = fine.abs().max(1.0);
                    // keep only points where the oracle itself has converged
                    if (coarse - fine).abs() > 2e-7 * scale {
                        continue;
                    }
                    accepted += 1;
                    worst = worst.max((got - fine).abs() / scale);
                }
            }
            if accepted < 20 {
                return Err(Error::Invalid(format!(
                    "only {accepted} converged FD oracle points"
                )));
            }
            Ok(worst)
        },
    )
}

// ---------------------------------------------------------------------------
// metric identities

fn metric_identity_checks(
    m: &MetricDefinition,
    seed: u64,
    opts: &ValidateOptions,
) -> Vec<CheckResult> {
    let audit = m.audit(opts.samples, seed);
    let tolerances = [
        ("L 2-homogeneity", 1e-8),
        ("g 0-homogeneity", 1e-9),
        ("g_v(v,v) = L(v)", 1e-9),
        ("Cartan (-1)-homogeneity", 1e-9),
        ("Cartan total symmetry", 1e-12),
        ("C_v(v,.,.) = 0", 1e-9),
    ];
    match audit {
        Ok(report) => tolerances
            .iter()
            .map(|(name, tol)| {
                let entry = report.entries.iter().find(|e| e.check == *name);
                run_check("metric", name, m.name(), *tol, opts, || {
                    entry
                        .map(|e| e.max_violation)
                        .ok_or_else(|| Error::Invalid("missing audit entry".into()))
                })
            })
            .collect(),
        Err(e) => tolerances
            .iter()
            .map(|(name, tol)| CheckResult {
                suite: "metric".into(),
                check: (*name).into(),
                metric: m.name().into(),
                max_residual: f64::NAN,
                tolerance: *tol,
                pass: false,
                error: Some(e.to_string()),
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// connection

fn levi_civita_reference(m: &MetricDefinition, x: &[f64]) -> Option<Vec<f64>> {
    let n = m.dim();
    match m.name() {
        "euclidean" | "pseudo_euclidean" => Some(vec![0.0; n * n * n]),
        "sphere" => {
            let th = x[0];
            // index (k·n + i)·n + j with n = 2
            let mut g = vec![0.0; 8];
            g[3] = -th.sin() * th.cos(); // Γ^θ_φφ
            g[5] = th.cos() / th.sin(); // Γ^φ_θφ
            g[6] = th.cos() / th.sin(); // Γ^φ_φθ
            Some(g)
        }
        "hyperbolic" => {
            // conformal factor f = ln(2/(1−r²)): Γᵏᵢⱼ = δᵏᵢ ∂ⱼf + δᵏⱼ ∂ᵢf − δᵢⱼ ∂ᵏf
            let r2: f64 = x.iter().map(|c| c * c).sum();
            let df: Vec<f64> = x.iter().map(|&c| 2.0 * c / (1.0 - r2)).collect();
            let mut g = vec![0.0; n * n * n];
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut val = 0.0;
                        if k == i {
                            val += df[j];
                        }
                        if k == j {
                            val += df[i];
                        }
                        if i == j {
                            val -= df[k];
                        }
                        g[(k * n + i) * n + j] = val;
                    }
                }
            }
            Some(g)
        }
        _ => None,
    }
}

fn connection_checks(
    m: &MetricDefinition,
    seed: u64,
    opts: &ValidateOptions,
) -> Vec<CheckResult> {
    let n = m.dim();
    let mut out = Vec::new();

    out.push(run_check("connection", "torsion freeness", m.name(), 0.0, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7431);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let (x, v) = m.sample_admissible(&mut rng)?;
            let gamma = christoffel_s::<f64>(m, &x, &v)?;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        worst = worst
                            .max((gamma[(k * n + i) * n + j] - gamma[(k * n + j) * n + i]).abs());
                    }
                }
            }
        }
        Ok(worst)
    }));

    out.push(run_check(
        "connection",
        "reference homogeneity",
        m.name(),
        1e-9,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x686f);
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let (x, v) = m.sample_admissible(&mut rng)?;
                let g0 = christoffel_s::<f64>(m, &x, &v)?;
                for lambda in [0.5, 2.0, 5.0] {
                    let vl: Vec<f64> = v.iter().map(|c| c * lambda).collect();
                    let gl = christoffel_s::<f64>(m, &x, &vl)?;
                    for (a, b) in g0.iter().zip(&gl) {
                        worst = worst.max((a - b).abs());
                    }
                }
            }
            Ok(worst)
        },
    ));

    if m.is_quadratic() {
        out.push(run_check(
            "connection",
            "Levi-Civita reduction",
            m.name(),
            1e-9,
            opts,
            || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c63);
                let mut worst: f64 = 0.0;
                for _ in 0..20 {
                    let (x, v) = m.sample_admissible(&mut rng)?;
                    let gamma = christoffel_s::<f64>(m, &x, &v)?;
                    let reference = levi_civita_reference(m, &x)
                        .ok_or_else(|| Error::Invalid("no closed form".into()))?;
                    for (a, b) in gamma.iter().zip(&reference) {
                        worst = worst.max((a - b).abs());
                    }
                }
                Ok(worst)
            },
        ));
    }

    out.push(run_check(
        "connection",
        "spray consistency",
        m.name(),
        1e-9,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7370);
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let (x, v) = m.sample_admissible(&mut rng)?;
                let gamma = christoffel_s::<f64>(m, &x, &v)?;
                let spray = spray_s::<f64>(m, &x, &v)?;
                for k in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            acc += gamma[(k * n + i) * n + j] * v[i] * v[j];
                        }
                    }
                    worst = worst.max((acc - 2.0 * spray[k]).abs());
                }
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "connection",
        "almost g-compatibility",
        m.name(),
        1e-7,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d63);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let curve = sample_curve(m, &mut rng, [0.0, 1.0])?;
                let x_field = sample_field(&curve, &mut rng, n)?;
                let y_field = sample_field(&curve, &mut rng, n)?;
                let w_ref = sample_reference(m, &curve, &mut rng)?;
                for k in 1..10 {
                    let t = 0.1 * k as f64;
                    let r = connection::check_almost_g_compat(
                        m, &curve, &x_field, &y_field, &w_ref, t, None,
                    )?;
                    worst = worst.max(r);
                }
            }
            Ok(worst)
        },
    ));

    out
}

// ---------------------------------------------------------------------------
// geodesics

fn geodesic_checks(m: &MetricDefinition, seed: u64, opts: &ValidateOptions) -> Vec<CheckResult> {
    let ode = OdeOptions::default();
    let mut out = Vec::new();

    out.push(run_check("geodesic", "energy conservation", m.name(), 1e-8, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6472);
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let geo = sample_geodesic(m, &mut rng, 1.0, &ode)?;
            worst = worst.max(geo.drift);
        }
        Ok(worst)
    }));

    out.push(run_check("geodesic", "flow homogeneity", m.name(), 1e-8, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x666c);
        let mut worst: f64 = 0.0;
        for _ in 0..4 {
            let geo = sample_geodesic(m, &mut rng, 0.8, &ode)?;
            let (x0, v0) = geo.state(0.0);
            for lambda in [0.5, 2.0] {
                let vl: Vec<f64> = v0.iter().map(|c| c * lambda).collect();
                let scaled = integrate_geodesic(m, &x0, &vl, [0.0, 0.8 / lambda], &ode)?;
                for k in 1..=8 {
                    let t = 0.1 * k as f64 / lambda.max(1.0);
                    let a = geo.position(lambda * t);
                    let b = scaled.position(t);
                    for i in 0..m.dim() {
                        worst = worst.max((a[i] - b[i]).abs());
                    }
                }
            }
        }
        Ok(worst)
    }));

    out.push(run_check(
        "geodesic",
        "transport preserves g-products",
        m.name(),
        1e-7,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7472);
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let geo = sample_geodesic(m, &mut rng, 0.8, &ode)?;
                let frame = parallel_frame(m, &geo, &ode)?;
                for k in 1..=8 {
                    let t = 0.1 * k as f64;
                    let (x, v) = geo.state(t);
                    let g = m.fundamental_tensor(&x, &v)?;
                    for i in 0..m.dim() {
                        for j in 0..m.dim() {
                            let ei = frame.fields[i].value(t, None)?;
                            let ej = frame.fields[j].value(t, None)?;
                            let expect = if i == j { frame.signs[i] } else { 0.0 };
                            worst = worst.max((g.inner(&ei, &ej) - expect).abs());
                        }
                    }
                }
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "geodesic",
        "transport fixes the velocity",
        m.name(),
        1e-7,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7678);
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let geo = sample_geodesic(m, &mut rng, 0.8, &ode)?;
                let curve = geo.to_curve();
                let (_, v0) = geo.state(0.0);
                let transported = parallel_transport(m, &curve, &v0, &ode)?;
                for k in 1..=8 {
                    let t = 0.1 * k as f64;
                    let w = transported.value(t, None)?;
                    let v = geo.velocity(t);
                    for i in 0..m.dim() {
                        worst = worst.max((w[i] - v[i]).abs());
                    }
                }
            }
            Ok(worst)
        },
    ));

    out
}

// ---------------------------------------------------------------------------
// curvature

fn curvature_checks(m: &MetricDefinition, seed: u64, opts: &ValidateOptions) -> Vec<CheckResult> {
    let ode = OdeOptions::default();
    let n = m.dim();
    let mut out = Vec::new();

    out.push(run_check("curvature", "route agreement", m.name(), 1e-6, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7261);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let geo = sample_geodesic(m, &mut rng, 0.2, &ode)?;
            let (x, v) = geo.state(0.0);
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let curve = geo.to_curve();
            let w_field = VectorFieldAlongCurve::constant(&curve, &w)?;
            let gdot = VectorFieldAlongCurve::from_closure(&curve, |t| geo.velocity(t))?;
            let spray_op = jacobi_operator_spray(m, &x, &v)?;
            let via_spray = spray_op.apply(&w);
            let via_var = jacobi_operator_variational(m, &curve, &w_field, &gdot, 0.0)?;
            let scale = via_spray
                .iter()
                .map(|c| c.abs())
                .fold(1.0f64, f64::max);
            for i in 0..n {
                worst = worst.max((via_spray[i] - via_var[i]).abs() / scale);
            }
        }
        Ok(worst)
    }));

    out.push(run_check(
        "curvature",
        "variation independence",
        m.name(),
        1e-6,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7669);
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                let geo = sample_geodesic(m, &mut rng, 0.2, &ode)?;
                let curve = geo.to_curve();
                let w_field = sample_field(&curve, &mut rng, n)?;
                let w2_field = sample_field(&curve, &mut rng, n)?;
                let z_field = sample_field(&curve, &mut rng, n)?;
                let t0 = 0.1;
                let linear = VariationSurface::new(&curve, &w_field)?;
                let quadratic =
                    VariationSurface::with_quadratic_term(&curve, &w_field, &w2_field)?;
                let plain = jacobi_operator_variational_fd(m, &linear, &z_field, t0, 1e-4)?;
                let curved = jacobi_operator_variational_fd(m, &quadratic, &z_field, t0, 1e-4)?;
                let jet = jacobi_operator_variational(m, &curve, &w_field, &z_field, t0)?;
                let scale = jet.iter().map(|c| c.abs()).fold(1.0f64, f64::max);
                for i in 0..n {
                    worst = worst.max((plain[i] - curved[i]).abs() / scale);
                    worst = worst.max((plain[i] - jet[i]).abs() / scale);
                }
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "curvature",
        "tensoriality in W",
        m.name(),
        1e-6,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7477);
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                let geo = sample_geodesic(m, &mut rng, 0.2, &ode)?;
                let curve = geo.to_curve();
                let w_field = sample_field(&curve, &mut rng, n)?;
                let gdot = VectorFieldAlongCurve::from_closure(&curve, |t| geo.velocity(t))?;
                let t0 = 0.1;
                let f = |t: f64| 0.7 + 0.5 * (3.0 * t).sin();
                let w_vals = w_field.value(t0, None)?;
                let _ = w_vals;
                let scaled = {
                    let wf = &w_field;
                    VectorFieldAlongCurve::from_closure(&curve, move |t| {
                        wf.value(t, Some(Side::Left))
                            .unwrap()
                            .iter()
                            .map(|c| c * f(t))
                            .collect()
                    })?
                };
                let r_scaled = jacobi_operator_variational(m, &curve, &scaled, &gdot, t0)?;
                let r_plain = jacobi_operator_variational(m, &curve, &w_field, &gdot, t0)?;
                let scale = r_plain.iter().map(|c| c.abs()).fold(1.0f64, f64::max);
                for i in 0..n {
                    worst = worst.max((r_scaled[i] - f(t0) * r_plain[i]).abs() / scale);
                }
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "curvature",
        "R(v,v)v vanishes",
        m.name(),
        1e-9,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7276);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let (x, v) = m.sample_admissible(&mut rng)?;
                let op = jacobi_operator_spray(m, &x, &v)?;
                let rv = op.apply(&v);
                let scale = v.iter().map(|c| c.abs()).fold(1.0f64, f64::max);
                for c in rv {
                    worst = worst.max(c.abs() / scale);
                }
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "curvature",
        "antisymmetry pairing",
        m.name(),
        1e-6,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6273);
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                // along a general (non-geodesic) admissible curve
                let curve = sample_curve(m, &mut rng, [0.0, 0.6])?;
                let u_field = sample_field(&curve, &mut rng, n)?;
                let p_field = sample_field(&curve, &mut rng, n)?;
                let gdot = {
                    let c = &curve;
                    VectorFieldAlongCurve::from_closure(c, move |t| {
                        c.velocity(t, Some(Side::Left)).unwrap()
                    })?
                };
                let t0 = 0.3;
                let x = curve.position(t0, None)?;
                let v = curve.velocity(t0, None)?;
                let g = m.fundamental_tensor(&x, &v)?;
                let r_gdot = jacobi_operator_variational(m, &curve, &u_field, &gdot, t0)?;
                let r_p = jacobi_operator_variational(m, &curve, &u_field, &p_field, t0)?;
                let pv = p_field.value(t0, None)?;
                let lhs = g.inner(&r_gdot, &pv);
                let rhs = -g.inner(&r_p, &v);
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                worst = worst.max((lhs - rhs).abs() / scale);
            }
            Ok(worst)
        },
    ));

    out
}

// ---------------------------------------------------------------------------
// variation

fn variation_checks(m: &MetricDefinition, seed: u64, opts: &ValidateOptions) -> Vec<CheckResult> {
    let ode = OdeOptions::default();
    let n = m.dim();
    let mut out = Vec::new();

    out.push(run_check(
        "variation",
        "first variation FD agreement",
        m.name(),
        1e-6,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6676);
            let mut worst: f64 = 0.0;
            // nine smooth cases plus one broken-curve case
            for _ in 0..9 {
                let curve = sample_curve(m, &mut rng, [0.0, 0.7])?;
                let w = sample_field(&curve, &mut rng, n)?;
                let formula = first_variation(m, &curve, &w)?;
                let fdv = energy_first_fd(m, &curve, &w, 1e-4)?;
                worst = worst.max((formula - fdv).abs() / formula.abs().max(1.0));
            }
            let (curve, w) = broken_case(m, &mut rng)?;
            let formula = first_variation(m, &curve, &w)?;
            let fdv = energy_first_fd(m, &curve, &w, 1e-4)?;
            worst = worst.max((formula - fdv).abs() / formula.abs().max(1.0));
            Ok(worst)
        },
    ));

    out.push(run_check(
        "variation",
        "second variation FD agreement",
        m.name(),
        1e-5,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7376);
            let geo = sample_geodesic(m, &mut rng, 0.6, &ode)?;
            let engine = GeodesicQuadrature::new(m, &geo)?;
            let curve = geo.to_curve();
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                let w = sample_field(&curve, &mut rng, n)?;
                let acc = chart_linear_transverse_acceleration(m, &geo, &w)?;
                let formula = second_variation_with(&engine, &geo, &w, Some(&acc))?;
                let fdv = energy_second_fd(m, &curve, &w, 1e-3)?;
                worst = worst.max((formula - fdv).abs() / formula.abs().max(1.0));
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "variation",
        "geodesic criticality",
        m.name(),
        1e-8,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6763);
            let mut worst: f64 = 0.0;
            for _ in 0..4 {
                let geo = sample_geodesic(m, &mut rng, 0.6, &ode)?;
                let curve = geo.to_curve();
                let amp: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.4..0.4)).collect();
                let w = VectorFieldAlongCurve::from_closure(&curve, move |t| {
                    let bump = (std::f64::consts::PI * t / 0.6).sin();
                    amp.iter().map(|a| a * bump).collect()
                })?;
                worst = worst.max(first_variation(m, &curve, &w)?.abs());
            }
            Ok(worst)
        },
    ));

    out.push(run_check(
        "variation",
        "index form symmetry",
        m.name(),
        1e-7,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6973);
            let geo = sample_geodesic(m, &mut rng, 0.6, &ode)?;
            let engine = GeodesicQuadrature::new(m, &geo)?;
            let curve = geo.to_curve();
            let p = point_patch(geo.position(0.0));
            let q = point_patch(geo.position(0.6));
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let mk = |c: Vec<f64>, f: f64| {
                    VectorFieldAlongCurve::from_closure(&curve, move |t| {
                        let tau = t / 0.6;
                        let bump = (std::f64::consts::PI * tau * f).sin();
                        c.iter().map(|x| x * bump).collect()
                    })
                };
                let v_field = mk(a, 1.0)?;
                let w_field = mk(b, 2.0)?;
                let ivw = index_form_with(&engine, &geo, &p, &q, &v_field, &w_field)?;
                let iwv = index_form_with(&engine, &geo, &p, &q, &w_field, &v_field)?;
                worst = worst.max((ivw - iwv).abs() / ivw.abs().max(1.0));
            }
            Ok(worst)
        },
    ));

    out
}

/// Admissible broken curve (two straight-in-chart pieces) and a continuous
/// field sharing its break.
fn broken_case(
    m: &MetricDefinition,
    rng: &mut ChaCha8Rng,
) -> Result<(PiecewiseCurve, VectorFieldAlongCurve)> {
    let n = m.dim();
    'outer: for _ in 0..80 {
        let (x0, v0) = sample_unit(m, rng)?;
        let d2: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x0c = x0.clone();
        let v0c = v0.clone();
        let d2c = d2.clone();
        let curve = PiecewiseCurve::from_closure_with_breaks([0.0, 0.4], &[0.2], move |t| {
            (0..n)
                .map(|i| {
                    if t <= 0.2 {
                        x0c[i] + 0.3 * v0c[i] * t
                    } else {
                        x0c[i] + 0.3 * v0c[i] * 0.2 + 0.3 * d2c[i] * (t - 0.2)
                    }
                })
                .collect()
        })?;
        for k in 0..=16 {
            let t = 0.4 * k as f64 / 16.0;
            let side = if t <= 0.2 { Side::Left } else { Side::Right };
            let side = if t == 0.0 { Side::Right } else { side };
            let x = curve.position(t, Some(side))?;
            let v = curve.velocity(t, Some(side))?;
            if !m.is_admissible(&x, &v) {
                continue 'outer;
            }
        }
        let w = sample_field(&curve, rng, n)?;
        return Ok((curve, w));
    }
    Err(Error::Invalid(format!(
        "could not sample a broken admissible curve for '{}'",
        m.name()
    )))
}

// ---------------------------------------------------------------------------
// submanifolds

fn submanifold_checks(
    m: &MetricDefinition,
    seed: u64,
    opts: &ValidateOptions,
) -> Vec<CheckResult> {
    let n = m.dim();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }

    let with_patch_samples = |mut body: Box<dyn FnMut(&MetricDefinition, &submanifold::SubmanifoldPatch, &[f64], &[f64]) -> Result<f64>>,
                              seed: u64|
     -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut done = 0;
        let mut attempts = 0;
        while done < 20 && attempts < 400 {
            attempts += 1;
            let (x0, _) = m.sample_admissible(&mut rng)?;
            let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 0.3 {
                continue;
            }
            let dir: Vec<f64> = dir.iter().map(|c| c / norm).collect();
            let patch = line_patch(x0.clone(), dir);
            let u = [rng.gen_range(-0.05..0.05)];
            let x = patch.point(&u);
            if !m.in_chart(&x) {
                continue;
            }
            let n_vec = match submanifold::normal_section(m, &patch, &u, None) {
                Ok(v) => v,
                Err(_) => continue,
            };
            match body(m, &patch, &u, &n_vec) {
                Ok(r) => {
                    worst = worst.max(r);
                    done += 1;
                }
                Err(Error::DegenerateRestriction { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        if done < 20 {
            return Err(Error::Invalid(format!(
                "could not collect 20 submanifold samples for '{}'",
                m.name()
            )));
        }
        Ok(worst)
    };

    out.push(run_check("submanifold", "second-fundamental-form duality", m.name(), 1e-7, opts, || {
        with_patch_samples(
            Box::new(move |m, patch, u, n_vec| {
                let basis = patch.tangent_basis(u)?;
                let t = &basis[0];
                let x = patch.point(u);
                let s = submanifold::second_fundamental_form(m, patch, u, n_vec, t, t)?;
                let st = submanifold::normal_second_fundamental_form(m, patch, u, n_vec, t)?;
                let g = m.fundamental_tensor(&x, n_vec)?;
                let lhs = g.inner(&s, n_vec);
                let rhs = -g.inner(&st, t);
                Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
            }),
            seed ^ 0x6475,
        )
    }));

    out.push(run_check("submanifold", "S symmetry", m.name(), 1e-7, opts, || {
        with_patch_samples(
            Box::new(move |m, patch, u, n_vec| {
                let basis = patch.tangent_basis(u)?;
                let t = &basis[0];
                let u_tan: Vec<f64> = t.iter().map(|c| 0.7 * c).collect();
                let w_tan: Vec<f64> = t.iter().map(|c| -1.3 * c).collect();
                let suw = submanifold::second_fundamental_form(m, patch, u, n_vec, &u_tan, &w_tan)?;
                let swu = submanifold::second_fundamental_form(m, patch, u, n_vec, &w_tan, &u_tan)?;
                let mut worst: f64 = 0.0;
                for (a, b) in suw.iter().zip(&swu) {
                    worst = worst.max((a - b).abs());
                }
                Ok(worst)
            }),
            seed ^ 0x7379,
        )
    }));

    out.push(run_check("submanifold", "homogeneity in N", m.name(), 1e-7, opts, || {
        with_patch_samples(
            Box::new(move |m, patch, u, n_vec| {
                let basis = patch.tangent_basis(u)?;
                let t = &basis[0];
                let n2: Vec<f64> = n_vec.iter().map(|c| 2.0 * c).collect();
                let s1 = submanifold::second_fundamental_form(m, patch, u, n_vec, t, t)?;
                let s2 = submanifold::second_fundamental_form(m, patch, u, &n2, t, t)?;
                let st1 = submanifold::normal_second_fundamental_form(m, patch, u, n_vec, t)?;
                let st2 = submanifold::normal_second_fundamental_form(m, patch, u, &n2, t)?;
                let mut worst: f64 = 0.0;
                for (a, b) in s1.iter().zip(&s2) {
                    worst = worst.max((a - b).abs());
                }
                for (a, b) in st1.iter().zip(&st2) {
                    worst = worst.max((2.0 * a - b).abs());
                }
                Ok(worst)
            }),
            seed ^ 0x686e,
        )
    }));

    out
}

// ---------------------------------------------------------------------------
// jacobi

fn jacobi_checks(m: &MetricDefinition, seed: u64, opts: &ValidateOptions) -> Vec<CheckResult> {
    let ode = OdeOptions::default();
    let tight = OdeOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        ..OdeOptions::default()
    };
    let n = m.dim();
    let mut out = Vec::new();

    out.push(run_check(
        "jacobi",
        "geodesic-variation oracle",
        m.name(),
        1e-5,
        opts,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6776);
            let mut worst: f64 = 0.0;
            // fixed-step runs share one grid so the dense-output errors of
            // the ±s families cancel in the central difference
            let rk4 = OdeOptions {
                method: crate::ode::OdeMethod::Rk4 { step: 0.5 / 256.0 },
                ..OdeOptions::default()
            };
            for _ in 0..10 {
                let geo = sample_geodesic(m, &mut rng, 0.5, &tight)?;
                let (x0, v0) = geo.state(0.0);
                let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s = 1e-3;
                let vp: Vec<f64> = v0.iter().zip(&w).map(|(a, b)| a + s * b).collect();
                let vm: Vec<f64> = v0.iter().zip(&w).map(|(a, b)| a - s * b).collect();
                let gp = integrate_geodesic(m, &x0, &vp, [0.0, 0.5], &rk4)?;
                let gm = integrate_geodesic(m, &x0, &vm, [0.0, 0.5], &rk4)?;
                let samples = 64usize;
                let ts: Vec<f64> = (0..=samples).map(|k| 0.5 * k as f64 / samples as f64).collect();
                let ys: Vec<Vec<f64>> = ts
                    .iter()
                    .map(|&t| {
                        let p = gp.position(t);
                        let q = gm.position(t);
                        (0..n).map(|i| (p[i] - q[i]) / (2.0 * s)).collect()
                    })
                    .collect();
                let j_fd = VectorFieldAlongCurve::from_segment_samples(&[(ts.clone(), ys)])?;
                // matches the integrated Jacobi field
                let j = solve_jacobi(m, &geo, &vec![0.0; n], &w, &tight)?;
                for &t in &ts {
                    let a = j_fd.value(t, None)?;
                    let b = j.value(t);
                    for i in 0..n {
                        worst = worst.max((a[i] - b[i]).abs());
                    }
                }
                // satisfies the Jacobi equation: residual of D(DJ) − Rᵞ(γ̇,J)γ̇
                let curve = geo.to_curve();
                let dts: Vec<f64> = ts.clone();
                let mut djs = Vec::with_capacity(dts.len());
                for &t in &dts {
                    let x = geo.position(t);
                    let v = geo.velocity(t);
                    let gamma = christoffel_s::<f64>(m, &x, &v)?;
                    let jv = j_fd.value(t, None)?;
                    let mut dj = j_fd.derivative(t, 1, None)?;
                    for k in 0..n {
                        for i in 0..n {
                            for jj in 0..n {
                                dj[k] += jv[i] * v[jj] * gamma[(k * n + i) * n + jj];
                            }
                        }
                    }
                    djs.push(dj);
                }
                let dj_field =
                    VectorFieldAlongCurve::from_segment_samples(&[(dts.clone(), djs)])?;
                for k in 8..=56 {
                    let t = 0.5 * k as f64 / 64.0;
                    let x = geo.position(t);
                    let v = geo.velocity(t);
                    let gamma = christoffel_s::<f64>(m, &x, &v)?;
                    let djv = dj_field.value(t, None)?;
                    let mut ddj = dj_field.derivative(t, 1, None)?;
                    for kk in 0..n {
                        for i in 0..n {
                            for jj in 0..n {
                                ddj[kk] += djv[i] * v[jj] * gamma[(kk * n + i) * n + jj];
                            }
                        }
                    }
                    let op = jacobi_operator_spray(m, &x, &v)?;
                    let rj = op.apply(&j_fd.value(t, None)?);
                    for i in 0..n {
                        worst = worst.max((ddj[i] - rj[i]).abs());
                    }
                }
                let _ = curve;
            }
            Ok(worst)
        },
    ));

    out.push(run_check("jacobi", "linearity", m.name(), 1e-9, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c69);
        let geo = sample_geodesic(m, &mut rng, 0.5, &tight)?;
        let j0a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dj0a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let j0b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dj0b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (al, be) = (0.6, -1.4);
        let combo_j0: Vec<f64> = j0a.iter().zip(&j0b).map(|(a, b)| al * a + be * b).collect();
        let combo_dj0: Vec<f64> = dj0a.iter().zip(&dj0b).map(|(a, b)| al * a + be * b).collect();
        let ja = solve_jacobi(m, &geo, &j0a, &dj0a, &tight)?;
        let jb = solve_jacobi(m, &geo, &j0b, &dj0b, &tight)?;
        let jc = solve_jacobi(m, &geo, &combo_j0, &combo_dj0, &tight)?;
        let mut worst: f64 = 0.0;
        for k in 0..=10 {
            let t = 0.05 * k as f64;
            let a = ja.value(t);
            let b = jb.value(t);
            let c = jc.value(t);
            for i in 0..n {
                worst = worst.max((al * a[i] + be * b[i] - c[i]).abs());
            }
        }
        Ok(worst)
    }));

    out.push(run_check("jacobi", "Wronskian constancy", m.name(), 1e-7, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7772);
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let geo = sample_geodesic(m, &mut rng, 0.7, &ode)?;
            let mk = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
            };
            let j1 = solve_jacobi(m, &geo, &mk(&mut rng), &mk(&mut rng), &ode)?;
            let j2 = solve_jacobi(m, &geo, &mk(&mut rng), &mk(&mut rng), &ode)?;
            let rep = wronskian(m, &geo, &j1, &j2)?;
            worst = worst.max(rep.drift);
        }
        Ok(worst)
    }));

    out.push(run_check("jacobi", "tangential Jacobi fields", m.name(), 1e-6, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x746a);
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let geo = sample_geodesic(m, &mut rng, 0.6, &ode)?;
            let (_, v0) = geo.state(0.0);
            let (a1, a2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let j0: Vec<f64> = v0.iter().map(|c| a2 * c).collect();
            let dj0: Vec<f64> = v0.iter().map(|c| a1 * c).collect();
            let j = solve_jacobi(m, &geo, &j0, &dj0, &ode)?;
            for k in 0..=6 {
                let t = 0.1 * k as f64;
                let v = geo.velocity(t);
                let got = j.value(t);
                for i in 0..n {
                    worst = worst.max((got[i] - (a1 * t + a2) * v[i]).abs());
                }
            }
        }
        Ok(worst)
    }));

    out.push(run_check("jacobi", "dexp FD agreement", m.name(), 1e-5, opts, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6478);
        let mut worst: f64 = 0.0;
        let mut done = 0;
        let mut tries = 0;
        while done < 3 && tries < 40 {
            tries += 1;
            let (x, v) = sample_unit(m, &mut rng)?;
            let vshort: Vec<f64> = v.iter().map(|c| 0.5 * c).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d = match crate::jacobi::dexp(m, &x, &vshort, &w, &tight) {
                Ok(d) => d,
                Err(Error::ExpDomain { .. }) => continue,
                Err(e) => return Err(e),
            };
            let s = 1e-3;
            let shift = |sgn: f64| -> Result<Vec<f64>> {
                let vv: Vec<f64> = vshort.iter().zip(&w).map(|(a, b)| a + sgn * s * b).collect();
                crate::geodesic::exponential_map(m, &x, &vv, &tight)
            };
            let p = match shift(1.0) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let q = match shift(-1.0) {
                Ok(q) => q,
                Err(_) => continue,
            };
            for i in 0..n {
                let fd = (p[i] - q[i]) / (2.0 * s);
                worst = worst.max((d[i] - fd).abs());
            }
            done += 1;
        }
        if done == 0 {
            return Err(Error::Invalid("no exp-domain samples".into()));
        }
        Ok(worst)
    }));

    out
}

// ---------------------------------------------------------------------------
// fixed-geometry checks

fn fixed_geometry_checks(id: &str, seed: u64, opts: &ValidateOptions) -> Vec<CheckResult> {
    let ode = OdeOptions::default();
    let mut out = Vec::new();
    match id {
        "sphere" => {
            let m = catalog::build("sphere", &serde_json::Value::Null).unwrap();
            out.push(run_check("geodesic", "sphere meridian landmark", id, 1e-8, opts, || {
                use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
                let geo = integrate_geodesic(
                    &m,
                    &[FRAC_PI_2, 0.0],
                    &[-1.0, 0.0],
                    [0.0, FRAC_PI_4],
                    &ode,
                )?;
                let p = geo.position(FRAC_PI_4);
                Ok((p[0] - FRAC_PI_4).abs().max(p[1].abs()))
            }));
            out.push(run_check("curvature", "sphere flag curvature", id, 1e-6, opts, || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7366);
                flag_sweep(&m, &mut rng, 1.0, 20)
            }));
            out.push(run_check("jacobi", "sphere conjugate instant", id, 1e-6, opts, || {
                use std::f64::consts::{FRAC_PI_2, PI};
                let geo = integrate_geodesic(
                    &m,
                    &[FRAC_PI_2, 0.0],
                    &[0.0, 1.0],
                    [0.0, 3.5],
                    &ode,
                )?;
                let zeros = conjugate_points(&m, &geo, &ode)?;
                if zeros.len() != 1 || zeros[0].1 != 1 {
                    return Err(Error::Invalid(format!("unexpected zeros {zeros:?}")));
                }
                Ok((zeros[0].0 - PI).abs())
            }));
            out.push(run_check("jacobi", "sphere great-circle focal instant", id, 1e-6, opts, || {
                use std::f64::consts::FRAC_PI_2;
                // P is the meridian great circle {φ = 0}; the equator leaves
                // it orthogonally and focalizes at the quarter turn
                let p = line_patch(vec![FRAC_PI_2, 0.0], vec![1.0, 0.0]);
                let geo = integrate_geodesic(
                    &m,
                    &[FRAC_PI_2, 0.0],
                    &[0.0, 1.0],
                    [0.0, 2.4],
                    &ode,
                )?;
                let zeros = focal_points(&m, &geo, &p, &ode)?;
                if zeros.is_empty() {
                    return Err(Error::Invalid("no focal point found".into()));
                }
                Ok((zeros[0].0 - FRAC_PI_2).abs())
            }));
            out.push(run_check("variation", "sphere kernel field", id, 1e-6, opts, || {
                use std::f64::consts::{FRAC_PI_2, PI};
                let geo = integrate_geodesic(
                    &m,
                    &[FRAC_PI_2, 0.0],
                    &[0.0, 1.0],
                    [0.0, PI],
                    &ode,
                )?;
                let engine = GeodesicQuadrature::new(&m, &geo)?;
                let curve = geo.to_curve();
                let p = point_patch(geo.position(0.0));
                let q = point_patch(geo.position(PI));
                // sin(t)·E with E the parallel unit normal: along the equator
                // the normal stays ∂θ
                let v_field =
                    VectorFieldAlongCurve::from_closure(&curve, |t| vec![t.sin(), 0.0])?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b66);
                let mut worst: f64 = 0.0;
                for _ in 0..10 {
                    let a: f64 = rng.gen_range(-1.0..1.0);
                    let b: f64 = rng.gen_range(1.0..2.0);
                    let w_field = VectorFieldAlongCurve::from_closure(&curve, move |t| {
                        vec![a * (b * t).sin() * (PI - t).sin() * t.sin(), 0.0]
                    })?;
                    let i = index_form_with(&engine, &geo, &p, &q, &v_field, &w_field)?;
                    worst = worst.max(i.abs());
                }
                // negative control: a non-Jacobi field must be seen
                let bad = VectorFieldAlongCurve::from_closure(&curve, |t| {
                    vec![t.sin() + 0.3 * (2.0 * t).sin(), 0.0]
                })?;
                let w_probe = VectorFieldAlongCurve::from_closure(&curve, |t| {
                    vec![(2.0 * t).sin() * t.sin() * (PI - t).sin(), 0.0]
                })?;
                let i_bad = index_form_with(&engine, &geo, &p, &q, &bad, &w_probe)?;
                if i_bad.abs() <= 1e-3 {
                    return Err(Error::Invalid(format!(
                        "negative control too small: {i_bad:.3e}"
                    )));
                }
                Ok(worst)
            }));
        }
        "hyperbolic" => {
            let m = catalog::build("hyperbolic", &serde_json::Value::Null).unwrap();
            out.push(run_check("curvature", "hyperbolic flag curvature", id, 1e-6, opts, || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6866);
                flag_sweep(&m, &mut rng, -1.0, 20)
            }));
            out.push(run_check("jacobi", "hyperbolic conjugate absence", id, 0.0, opts, || {
                let geo =
                    integrate_geodesic(&m, &[0.1, -0.05], &[0.4, 0.3], [0.0, 2.5], &ode)?;
                let zeros = conjugate_points(&m, &geo, &ode)?;
                Ok(zeros.len() as f64)
            }));
        }
        "euclidean" => {
            let m = catalog::build("euclidean", &serde_json::Value::Null).unwrap();
            out.push(run_check("curvature", "euclidean flag curvature", id, 1e-9, opts, || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6566);
                flag_sweep(&m, &mut rng, 0.0, 20)
            }));
            out.push(run_check("jacobi", "circle focal instant", id, 1e-6, opts, || {
                let p = circle_patch([0.0, 0.0], 1.0);
                let geo =
                    integrate_geodesic(&m, &[1.0, 0.0], &[-1.0, 0.0], [0.0, 1.8], &ode)?;
                let zeros = focal_points(&m, &geo, &p, &ode)?;
                if zeros.len() != 1 {
                    return Err(Error::Invalid(format!("unexpected zeros {zeros:?}")));
                }
                Ok((zeros[0].0 - 1.0).abs())
            }));
            out.push(run_check("variation", "focal kernel consistency", id, 1e-5, opts, || {
                focal_kernel_consistency(&m, seed)
            }));
            out.push(run_check("variation", "criticality perturbations", id, 0.0, opts, || {
                criticality_perturbations(&m)
            }));
            out.push(run_check("submanifold", "shape operator reduction", id, 1e-7, opts, || {
                shape_operator_reduction()
            }));
        }
        "funk" => {
            let m = catalog::build("funk", &serde_json::Value::Null).unwrap();
            out.push(run_check("curvature", "funk flag curvature", id, 1e-5, opts, || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6675);
                let spray_worst = flag_sweep(&m, &mut rng, -0.25, 20)?;
                // cross-check by the variational route on a few flags
                let mut worst = spray_worst;
                for _ in 0..4 {
                    let (x, v) = sample_unit(&m, &mut rng)?;
                    let w: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    match flag_curvature_variational(&m, &x, &v, &w, &ode) {
                        Ok(k) => worst = worst.max((k + 0.25).abs()),
                        Err(Error::DegenerateFlag { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
                Ok(worst)
            }));
        }
        "quartic" => {
            let m = catalog::build("quartic", &serde_json::Value::Null).unwrap();
            out.push(run_check("curvature", "quartic flag curvature", id, 1e-9, opts, || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7166);
                flag_sweep(&m, &mut rng, 0.0, 20)
            }));
        }
        _ => {}
    }
    out
}

fn flag_sweep(
    m: &MetricDefinition,
    rng: &mut ChaCha8Rng,
    expected: f64,
    flags: usize,
) -> Result<f64> {
    let n = m.dim();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut tries = 0;
    while done < flags && tries < flags * 20 {
        tries += 1;
        let (x, v) = m.sample_admissible(rng)?;
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        match flag_curvature(m, &x, &v, &w) {
            Ok(k) => {
                worst = worst.max((k - expected).abs());
                done += 1;
            }
            Err(Error::DegenerateFlag { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if done < flags {
        return Err(Error::Invalid("not enough nondegenerate flags".into()));
    }
    Ok(worst)
}

/// At the circle's focal instant, the vanishing P-Jacobi field must be in
/// the kernel of the index form toward a point endmanifold at the focus.
fn focal_kernel_consistency(m: &MetricDefinition, seed: u64) -> Result<f64> {
    let ode = OdeOptions::default();
    let p = circle_patch([0.0, 0.0], 1.0);
    let geo = integrate_geodesic(m, &[1.0, 0.0], &[-1.0, 0.0], [0.0, 1.8], &ode)?;
    let zeros = focal_points(m, &geo, &p, &ode)?;
    let t_star = zeros
        .first()
        .ok_or_else(|| Error::Invalid("no focal point".into()))?
        .0;
    // restrict the geodesic to [0, t*]
    let sub = integrate_geodesic(m, &[1.0, 0.0], &[-1.0, 0.0], [0.0, t_star], &ode)?;
    let basis = p_jacobi_basis(m, &sub, &p, &ode)?;
    // the kernel combination: evaluate the field matrix at t*
    let nmat = nalgebra::DMatrix::from_fn(2, basis.len(), |i, f| basis[f].value(t_star)[i]);
    let svd = nmat.svd(true, true);
    let vt = svd.v_t.as_ref().unwrap();
    let last = vt.nrows() - 1;
    let coeff: Vec<f64> = (0..basis.len()).map(|f| vt[(last, f)]).collect();
    let j0: Vec<f64> = (0..2)
        .map(|i| {
            basis
                .iter()
                .zip(&coeff)
                .map(|(b, c)| c * b.value(0.0)[i])
                .sum()
        })
        .collect();
    let dj0: Vec<f64> = (0..2)
        .map(|i| {
            basis
                .iter()
                .zip(&coeff)
                .map(|(b, c)| c * b.derivative(0.0)[i])
                .sum()
        })
        .collect();
    let kernel_field = solve_jacobi(m, &sub, &j0, &dj0, &ode)?;
    let q = point_patch(sub.position(t_star));
    let engine = GeodesicQuadrature::new(m, &sub)?;
    let curve = sub.to_curve();
    // tangent at the start is the circle tangent (0, ±1)
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x666b);
    let mut worst: f64 = 0.0;
    let v_field = VectorFieldAlongCurve::from_closure(&curve, move |t| kernel_field.value(t))?;
    for _ in 0..10 {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let w_field = VectorFieldAlongCurve::from_closure(&curve, move |t| {
            let tau = t / t_star;
            vec![
                b * (std::f64::consts::PI * tau).sin(),
                a * (1.0 - tau) + b * (std::f64::consts::PI * tau).sin(),
            ]
        })?;
        let i = index_form_with(&engine, &sub, &p, &q, &v_field, &w_field)?;
        worst = worst.max(i.abs());
    }
    Ok(worst)
}

/// The three criticality negative controls: a non-geodesic arc, a broken
/// corner, and a tilted endpoint must each fail with residual above 1e-3
/// while the straight orthogonal segment passes.
fn criticality_perturbations(m: &MetricDefinition) -> Result<f64> {
    let p = line_patch(vec![0.0, 0.0], vec![0.0, 1.0]);
    let q = line_patch(vec![1.0, 0.0], vec![0.0, 1.0]);
    let straight = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, 0.0])?;
    let rep = critical_point_test(m, &straight, &p, &q, 16, 1e-6)?;
    if !rep.critical {
        return Err(Error::Invalid(format!("straight segment not critical: {rep:?}")));
    }

    // bent arc: geodesic residual must exceed 1e-3
    let arc = PiecewiseCurve::from_closure([0.0, 1.0], |t| {
        vec![t, 0.1 * (std::f64::consts::PI * t).sin()]
    })?;
    let rep = critical_point_test(m, &arc, &p, &q, 16, 1e-6)?;
    if rep.critical || rep.max_geodesic_residual <= 1e-3 {
        return Err(Error::Invalid(format!("bent arc slipped through: {rep:?}")));
    }

    // broken velocity: corner at the midpoint
    let broken = PiecewiseCurve::from_closure_with_breaks([0.0, 1.0], &[0.5], |t| {
        if t <= 0.5 {
            vec![t, 0.1 * t]
        } else {
            vec![t, 0.1 * (1.0 - t)]
        }
    })?;
    let rep = critical_point_test(m, &broken, &p, &q, 16, 1e-6)?;
    if rep.critical || rep.max_legendre_jump <= 1e-3 {
        return Err(Error::Invalid(format!("broken corner slipped through: {rep:?}")));
    }

    // tilted: straight but not orthogonal at the far end
    let q_tilted = line_patch(vec![1.0, 0.0], vec![0.17, 1.0]);
    let rep = critical_point_test(m, &straight, &p, &q_tilted, 16, 1e-6)?;
    if rep.critical || rep.orthogonality_end <= 1e-3 {
        return Err(Error::Invalid(format!("tilted endpoint slipped through: {rep:?}")));
    }
    Ok(0.0)
}

/// Euclidean 3-space, round sphere of radius 2: the second fundamental form
/// must match the classical shape operator `S(U,U) = −|U|²/R · N̂`.
fn shape_operator_reduction() -> Result<f64> {
    let m = catalog::build("euclidean", &serde_json::json!({ "dim": 3 }))?;
    let patch = sphere_patch([0.0, 0.0, 0.0], 2.0);
    let mut worst: f64 = 0.0;
    for (pu, pv) in [(1.2, 0.3), (0.9, -0.8), (1.8, 1.1)] {
        let u = [pu, pv];
        let x = patch.point(&u);
        let n_vec: Vec<f64> = x.iter().map(|c| c / 2.0).collect();
        let basis = patch.tangent_basis(&u)?;
        for t in &basis {
            let s = submanifold::second_fundamental_form(&m, &patch, &u, &n_vec, t, t)?;
            let t2: f64 = t.iter().map(|c| c * c).sum();
            for i in 0..3 {
                let expect = -t2 / 2.0 * n_vec[i];
                worst = worst.max((s[i] - expect).abs());
            }
        }
    }
    Ok(worst)
}
