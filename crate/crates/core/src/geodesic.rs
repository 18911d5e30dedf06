//! Geodesic initial-value problem, exponential map, and parallel transport.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::connection::{christoffel_s, spray_s};
use crate::curve::{PiecewiseCurve, Side, VectorFieldAlongCurve};
use crate::error::{Error, Result};
use crate::metric::MetricDefinition;
use crate::ode::{integrate, DenseOutput, OdeOptions};
use crate::quadrature;

static GEODESIC_COUNTER: AtomicU64 = AtomicU64::new(1);

/// An integrated geodesic with dense output and conservation diagnostics.
pub struct GeodesicRecord {
    id: u64,
    metric_name: String,
    dim: usize,
    dense: Arc<DenseOutput>,
    pub span: [f64; 2],
    /// ½ ∫ L(γ̇) dt over the span.
    pub energy: f64,
    /// max |L(γ̇(t)) − L(γ̇(a))| over the span.
    pub drift: f64,
}

impl GeodesicRecord {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn metric_name(&self) -> &str {
        &self.metric_name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        self.dense.eval(t)[..self.dim].to_vec()
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        self.dense.eval(t)[self.dim..].to_vec()
    }

    /// `(x(t), ẋ(t))`.
    pub fn state(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let s = self.dense.eval(t);
        (s[..self.dim].to_vec(), s[self.dim..].to_vec())
    }

    /// Accepted integrator step endpoints (natural quadrature panels).
    pub fn step_times(&self) -> Vec<f64> {
        self.dense.step_times()
    }

    /// Views the geodesic as a single-segment curve sharing the dense output.
    pub fn to_curve(&self) -> PiecewiseCurve {
        PiecewiseCurve::from_dense(self.dense.clone(), self.dim)
    }
}

/// Integrates the geodesic equation `ẍ = −2G(x, ẋ)` from `(x0, v0)` over
/// `span`. Admissibility is checked at every accepted step; leaving the
/// admissible set reports a bisection-refined exit time.
pub fn integrate_geodesic(
    m: &MetricDefinition,
    x0: &[f64],
    v0: &[f64],
    span: [f64; 2],
    opts: &OdeOptions,
) -> Result<GeodesicRecord> {
    m.check_admissible(x0, v0, Some(span[0]))?;
    if !(span[1] > span[0]) {
        return Err(Error::Invalid("geodesic span must be increasing".into()));
    }
    let n = m.dim();
    let rhs = move |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (x, v) = y.split_at(n);
        let g = spray_s::<f64>(m, x, v)?;
        let mut dy = Vec::with_capacity(2 * n);
        dy.extend_from_slice(v);
        dy.extend(g.iter().map(|gi| -2.0 * gi));
        Ok(dy)
    };
    let guard = move |_t: f64, y: &[f64]| -> bool {
        let (x, v) = y.split_at(n);
        m.is_admissible(x, v)
    };
    let mut y0 = Vec::with_capacity(2 * n);
    y0.extend_from_slice(x0);
    y0.extend_from_slice(v0);
    let run = integrate(&rhs, span[0], &y0, span[1], opts, Some(&guard))?;
    if let Some(t_exit) = run.exit {
        return Err(Error::DomainExit { t_exit });
    }
    let dense = Arc::new(run.dense);

    let l0 = m.evaluate_unchecked(x0, v0);
    let mut drift: f64 = 0.0;
    let mut energy = 0.0;
    let panels = dense.step_times();
    for (t, w) in quadrature::nodes(&panels) {
        let s = dense.eval(t);
        let l = m.evaluate_unchecked(&s[..n], &s[n..]);
        drift = drift.max((l - l0).abs());
        energy += 0.5 * w * l;
    }
    let s_end = dense.eval(span[1]);
    drift = drift.max((m.evaluate_unchecked(&s_end[..n], &s_end[n..]) - l0).abs());

    Ok(GeodesicRecord {
        id: GEODESIC_COUNTER.fetch_add(1, Ordering::Relaxed),
        metric_name: m.name().to_string(),
        dim: n,
        dense,
        span,
        energy,
        drift,
    })
}

/// `exp_p(v) = γ_v(1)`; errors when the geodesic leaves the chart or the
/// admissible set before `t = 1`.
pub fn exponential_map(
    m: &MetricDefinition,
    p: &[f64],
    v: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<f64>> {
    match integrate_geodesic(m, p, v, [0.0, 1.0], opts) {
        Ok(record) => Ok(record.position(1.0)),
        Err(Error::DomainExit { t_exit }) => Err(Error::ExpDomain { t_exit }),
        Err(e) => Err(e),
    }
}

/// Parallel transport of `w0` along the curve: solves `D^γ̇ X = 0` per smooth
/// segment with continuity at breaks. Transport is linear in `w0`.
pub fn parallel_transport(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    w0: &[f64],
    opts: &OdeOptions,
) -> Result<VectorFieldAlongCurve> {
    let n = m.dim();
    let span = curve.span();
    let mut edges = vec![span[0]];
    edges.extend(curve.breaks());
    edges.push(span[1]);

    let mut parts: Vec<(Vec<f64>, Vec<Vec<f64>>)> = Vec::new();
    let mut w = w0.to_vec();
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let side_for = move |t: f64| {
            if (t - a).abs() < 1e-12 {
                Some(Side::Right)
            } else {
                Some(Side::Left)
            }
        };
        let rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
            let t = t.clamp(a, b);
            let x = curve.position(t, side_for(t))?;
            let gdot = curve.velocity(t, side_for(t))?;
            let gamma = christoffel_s::<f64>(m, &x, &gdot)?;
            let mut dy = vec![0.0; n];
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        dy[k] -= y[i] * gdot[j] * gamma[(k * n + i) * n + j];
                    }
                }
            }
            Ok(dy)
        };
        let run = integrate(&rhs, a, &w, b, opts, None)?;
        let samples = ((b - a) * crate::curve::SAMPLES_PER_UNIT as f64).ceil() as usize;
        let samples = samples.clamp(16, 4096);
        let ts: Vec<f64> = (0..=samples)
            .map(|i| a + (b - a) * i as f64 / samples as f64)
            .collect();
        let ys: Vec<Vec<f64>> = ts.iter().map(|&t| run.dense.eval(t)).collect();
        w = run.dense.eval(b);
        parts.push((ts, ys));
    }
    VectorFieldAlongCurve::from_segment_samples(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use serde_json::Value;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn euclidean_geodesics_are_lines() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let g = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 2.0], [0.0, 1.0], &OdeOptions::default())
            .unwrap();
        let p = g.position(1.0);
        assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] - 2.0).abs() < 1e-12);
        assert!(g.drift < 1e-12);
        // E = ½ ∫ 5 = 2.5
        assert!((g.energy - 2.5).abs() < 1e-12);
    }

    #[test]
    fn sphere_meridian_reaches_quarter_pole() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let g = integrate_geodesic(
            &m,
            &[FRAC_PI_2, 0.0],
            &[-1.0, 0.0],
            [0.0, FRAC_PI_4],
            &OdeOptions::default(),
        )
        .unwrap();
        let p = g.position(FRAC_PI_4);
        assert!((p[0] - FRAC_PI_4).abs() < 1e-9, "θ = {}", p[0]);
        assert!(p[1].abs() < 1e-9);
        assert!(g.drift < 1e-9);
    }

    #[test]
    fn lightlike_geodesic_conserves_zero() {
        let m = catalog::build("pseudo_euclidean", &Value::Null).unwrap();
        let g = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 1.0], [0.0, 1.0], &OdeOptions::default())
            .unwrap();
        assert!(g.drift < 1e-13);
        assert!(g.energy.abs() < 1e-13);
    }

    #[test]
    fn exponential_map_is_translation_in_flat_space() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let q = exponential_map(&m, &[1.0, -2.0], &[0.25, 0.5], &OdeOptions::default()).unwrap();
        assert!((q[0] - 1.25).abs() < 1e-12 && (q[1] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn domain_exit_is_reported_with_time() {
        // a meridian run reaches the pole of the (θ, φ) chart, where the
        // fundamental tensor degenerates: the run must stop near t = π/2
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let r = integrate_geodesic(
            &m,
            &[FRAC_PI_2, 0.0],
            &[-1.0, 0.0],
            [0.0, 2.0],
            &OdeOptions::default(),
        );
        match r {
            Err(Error::DomainExit { t_exit }) => {
                assert!(
                    (t_exit - FRAC_PI_2).abs() < 1e-3,
                    "exit at {t_exit}, expected ≈ π/2"
                );
            }
            Err(other) => panic!("expected domain exit, got {other:?}"),
            Ok(g) => panic!("expected domain exit, got a full run to {:?}", g.span),
        }
    }

    #[test]
    fn transport_in_flat_space_is_constant() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let curve = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, t * t]).unwrap();
        let f = parallel_transport(&m, &curve, &[0.3, -1.1], &OdeOptions::default()).unwrap();
        let w = f.value(1.0, None).unwrap();
        assert!((w[0] - 0.3).abs() < 1e-10 && (w[1] + 1.1).abs() < 1e-10);
    }
}
