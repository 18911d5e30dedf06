//! Energy functional, Legendre transform, first and second variation,
//! criticality, and the two-endmanifold index form.
//!
//! Quadrature is composite 8-point Gauss–Legendre over each smooth segment's
//! own knots. The curvature term in second-variation and index-form
//! integrands is evaluated through the spray-route operator using the
//! pairing `−g(Rᵞ(γ̇,V)W, γ̇) = g(Rᵞ(γ̇,V)γ̇, W)`, which holds along any
//! admissible curve and is itself verified by the validation suite.

use crate::connection::{christoffel_s, spray_s};
use crate::curvature::jacobi_operator_spray;
use crate::curve::{PiecewiseCurve, Side, VectorFieldAlongCurve};
use crate::error::{Error, Result};
use crate::geodesic::GeodesicRecord;
use crate::metric::MetricDefinition;
use crate::quadrature;
use crate::submanifold::{self, SubmanifoldPatch};

/// Energy `E(γ) = ½ ∫ L(γ̇) dt` by segment-wise Gauss–Legendre quadrature.
pub fn energy(m: &MetricDefinition, curve: &PiecewiseCurve) -> Result<f64> {
    let mut acc = 0.0;
    for panels in curve.quadrature_panels() {
        for (t, w) in quadrature::nodes(&panels) {
            let x = curve.position(t, Some(Side::Left))?;
            let v = curve.velocity(t, Some(Side::Left))?;
            m.check_admissible(&x, &v, Some(t))?;
            acc += 0.5 * w * m.evaluate_unchecked(&x, &v);
        }
    }
    Ok(acc)
}

/// Legendre transformation `ℒ_L(v) = g_v(v, ·)` as covector components.
pub fn legendre(m: &MetricDefinition, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    m.check_admissible(x, v, None)?;
    let g = m.fundamental_tensor(x, v)?;
    Ok(g.lower(v))
}

/// The deformed curve `t ↦ γ(t) + s·W(t)`, segment by segment.
pub fn deform(
    curve: &PiecewiseCurve,
    w: &VectorFieldAlongCurve,
    s: f64,
) -> Result<PiecewiseCurve> {
    if !w.shares_breaks_with(curve) {
        return Err(Error::BreakMismatch);
    }
    let panels = curve.quadrature_panels();
    let mut parts = Vec::with_capacity(panels.len());
    for knots in &panels {
        let mut ts = knots.clone();
        if ts.len() > 2048 {
            let a = ts[0];
            let b = *ts.last().unwrap();
            ts = (0..=2048)
                .map(|k| a + (b - a) * k as f64 / 2048.0)
                .collect();
        }
        let mut ys: Vec<Vec<f64>> = Vec::with_capacity(ts.len());
        for (k, &t) in ts.iter().enumerate() {
            let side = if k == 0 { Side::Right } else { Side::Left };
            let p = curve.position(t, Some(side))?;
            let wv = w.value(t, Some(side))?;
            ys.push(p.iter().zip(&wv).map(|(a, b)| a + s * b).collect());
        }
        parts.push((ts, ys));
    }
    PiecewiseCurve::from_segment_samples(&parts)
}

/// Central finite difference `dE/ds` of the chart-linear family `γ + sW`.
pub fn energy_first_fd(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    w: &VectorFieldAlongCurve,
    step: f64,
) -> Result<f64> {
    let ep = energy(m, &deform(curve, w, step)?)?;
    let em = energy(m, &deform(curve, w, -step)?)?;
    Ok((ep - em) / (2.0 * step))
}

/// Central finite difference `d²E/ds²` of the chart-linear family `γ + sW`.
///
/// All three energies go through the same deformed-curve representation so
/// that the (s-independent) resampling bias cancels in the stencil.
pub fn energy_second_fd(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    w: &VectorFieldAlongCurve,
    step: f64,
) -> Result<f64> {
    let e0 = energy(m, &deform(curve, w, 0.0)?)?;
    let ep = energy(m, &deform(curve, w, step)?)?;
    let em = energy(m, &deform(curve, w, -step)?)?;
    Ok((ep + em - 2.0 * e0) / (step * step))
}

/// `D^γ̇_γ γ̇ = γ̈ + 2G(γ, γ̇)` at `t` (the geodesic-equation residual).
pub fn velocity_covariant_derivative(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    t: f64,
    side: Option<Side>,
) -> Result<Vec<f64>> {
    let x = curve.position(t, side)?;
    let vj = curve.velocity_jets(m, t, 1, side)?;
    let v: Vec<f64> = vj.iter().map(|j| j.value()).collect();
    let acc: Vec<f64> = vj.iter().map(|j| j.coeff(&[1])).collect();
    m.check_admissible(&x, &v, Some(t))?;
    let g = spray_s::<f64>(m, &x, &v)?;
    Ok(acc.iter().zip(&g).map(|(a, gi)| a + 2.0 * gi).collect())
}

/// First variation of the energy along `W`:
///
/// ```text
/// dE(W) = −∫ g_γ̇(W, D^γ̇γ̇) dt + [g_γ̇(W, γ̇)]ₐᵇ
///          + Σᵢ (ℒ(γ̇(tᵢ⁻)) − ℒ(γ̇(tᵢ⁺)))(W(tᵢ))
/// ```
///
/// The jump orientation is fixed by integration by parts on each smooth
/// piece and is verified against central finite differences of the energy
/// over broken variations.
pub fn first_variation(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    w: &VectorFieldAlongCurve,
) -> Result<f64> {
    if !w.shares_breaks_with(curve) {
        return Err(Error::BreakMismatch);
    }
    let mut acc = 0.0;
    for panels in curve.quadrature_panels() {
        for (t, weight) in quadrature::nodes(&panels) {
            let side = Some(Side::Left);
            let x = curve.position(t, side)?;
            let v = curve.velocity(t, side)?;
            m.check_admissible(&x, &v, Some(t))?;
            let dv = velocity_covariant_derivative(m, curve, t, side)?;
            let g = m.fundamental_tensor(&x, &v)?;
            let wv = w.value(t, side)?;
            acc -= weight * g.inner(&wv, &dv);
        }
    }
    let span = curve.span();
    let boundary_at = |t: f64, side: Side| -> Result<f64> {
        let x = curve.position(t, Some(side))?;
        let v = curve.velocity(t, Some(side))?;
        let g = m.fundamental_tensor(&x, &v)?;
        let wv = w.value(t, Some(side))?;
        Ok(g.inner(&wv, &v))
    };
    acc += boundary_at(span[1], Side::Left)? - boundary_at(span[0], Side::Right)?;
    for t in curve.breaks() {
        let x = curve.position(t, Some(Side::Left))?;
        let l_plus = legendre(m, &x, &curve.velocity(t, Some(Side::Right))?)?;
        let l_minus = legendre(m, &x, &curve.velocity(t, Some(Side::Left))?)?;
        let wv = w.value(t, Some(Side::Left))?;
        for i in 0..m.dim() {
            acc += (l_minus[i] - l_plus[i]) * wv[i];
        }
    }
    Ok(acc)
}

/// Per-node data along a geodesic shared by second-variation and index-form
/// integrands: Christoffel symbols, the spray-route Jacobi operator matrix,
/// and the fundamental tensor at the velocity.
pub struct GeodesicQuadrature<'a> {
    m: &'a MetricDefinition,
    curve: PiecewiseCurve,
    nodes: Vec<NodeData>,
}

struct NodeData {
    t: f64,
    weight: f64,
    v: Vec<f64>,
    g: Vec<f64>,
    gamma: Vec<f64>,
    rmat: Vec<f64>,
}

impl<'a> GeodesicQuadrature<'a> {
    pub fn new(m: &'a MetricDefinition, geo: &GeodesicRecord) -> Result<Self> {
        let curve = geo.to_curve();
        check_is_geodesic(m, &curve)?;
        let n = m.dim();
        let mut nodes = Vec::new();
        for panels in curve.quadrature_panels() {
            for (t, weight) in quadrature::nodes(&panels) {
                let (x, v) = geo.state(t);
                let gm = m.fundamental_tensor(&x, &v)?;
                let mut g = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        g[i * n + j] = gm.matrix()[(i, j)];
                    }
                }
                let gamma = christoffel_s::<f64>(m, &x, &v)?;
                let op = jacobi_operator_spray(m, &x, &v)?;
                nodes.push(NodeData {
                    t,
                    weight,
                    v,
                    g,
                    gamma,
                    rmat: op.matrix().to_vec(),
                });
            }
        }
        Ok(GeodesicQuadrature { m, curve, nodes })
    }

    pub fn curve(&self) -> &PiecewiseCurve {
        &self.curve
    }

    fn covariant_w(&self, node: &NodeData, w: &VectorFieldAlongCurve) -> Result<Vec<f64>> {
        let n = self.m.dim();
        let wv = w.value(node.t, Some(Side::Left))?;
        let mut dw = w.derivative(node.t, 1, Some(Side::Left))?;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dw[k] += wv[i] * node.v[j] * node.gamma[(k * n + i) * n + j];
                }
            }
        }
        Ok(dw)
    }

    /// `∫ (g(Rᵞ(γ̇,V)γ̇, W) + g(V′, W′)) dt`.
    pub fn index_integral(
        &self,
        v_field: &VectorFieldAlongCurve,
        w_field: &VectorFieldAlongCurve,
    ) -> Result<f64> {
        let n = self.m.dim();
        let mut acc = 0.0;
        for node in &self.nodes {
            let vv = v_field.value(node.t, Some(Side::Left))?;
            let wv = w_field.value(node.t, Some(Side::Left))?;
            let rv: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|k| node.rmat[i * n + k] * vv[k]).sum())
                .collect();
            let dv = self.covariant_w(node, v_field)?;
            let dw = self.covariant_w(node, w_field)?;
            let quad = |a: &[f64], b: &[f64]| -> f64 {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += node.g[i * n + j] * a[i] * b[j];
                    }
                }
                s
            };
            acc += node.weight * (quad(&rv, &wv) + quad(&dv, &dw));
        }
        Ok(acc)
    }
}

fn check_is_geodesic(m: &MetricDefinition, curve: &PiecewiseCurve) -> Result<()> {
    if !curve.breaks().is_empty() {
        return Err(Error::NotAGeodesic { residual: f64::NAN });
    }
    let span = curve.span();
    let mut worst: f64 = 0.0;
    for k in 0..7 {
        let t = span[0] + (span[1] - span[0]) * (0.05 + 0.9 * k as f64 / 6.0);
        let dv = velocity_covariant_derivative(m, curve, t, None)?;
        let v = curve.velocity(t, None)?;
        let scale = v.iter().map(|c| c * c).sum::<f64>().max(1e-12);
        worst = worst.max(dv.iter().map(|c| c * c).sum::<f64>().sqrt() / scale);
    }
    if worst > 1e-5 {
        return Err(Error::NotAGeodesic { residual: worst });
    }
    Ok(())
}

/// Transverse acceleration of the chart-linear family `γ + sW`:
/// `(D_{βt} β̇t)ᵏ|ₛ₌₀ = Wⁱ Wʲ Γᵏᵢⱼ(γ, γ̇)`.
pub fn chart_linear_transverse_acceleration(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    w: &VectorFieldAlongCurve,
) -> Result<VectorFieldAlongCurve> {
    let n = m.dim();
    let span = geo.span;
    let samples = 128usize;
    let ts: Vec<f64> = (0..=samples)
        .map(|i| span[0] + (span[1] - span[0]) * i as f64 / samples as f64)
        .collect();
    let mut ys = Vec::with_capacity(ts.len());
    for &t in &ts {
        let (x, v) = geo.state(t);
        let gamma = christoffel_s::<f64>(m, &x, &v)?;
        let wv = w.value(t, None)?;
        let mut acc = vec![0.0; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    acc[k] += wv[i] * wv[j] * gamma[(k * n + i) * n + j];
                }
            }
        }
        ys.push(acc);
    }
    VectorFieldAlongCurve::from_segment_samples(&[(ts, ys)])
}

/// Second variation of the energy at a geodesic:
///
/// ```text
/// E″(0) = ∫ (−g(Rᵞ(γ̇,W)W, γ̇) + g(W′, W′)) dt + [g(acc, γ̇)]ₐᵇ
/// ```
///
/// `transverse_acc` is the variation's transverse acceleration field; `None`
/// means it vanishes. For the chart-linear family use
/// [`chart_linear_transverse_acceleration`].
pub fn second_variation(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    w: &VectorFieldAlongCurve,
    transverse_acc: Option<&VectorFieldAlongCurve>,
) -> Result<f64> {
    let engine = GeodesicQuadrature::new(m, geo)?;
    second_variation_with(&engine, geo, w, transverse_acc)
}

/// Second variation using a prebuilt per-node cache (for sweeps over many
/// fields along one geodesic).
pub fn second_variation_with(
    engine: &GeodesicQuadrature,
    geo: &GeodesicRecord,
    w: &VectorFieldAlongCurve,
    transverse_acc: Option<&VectorFieldAlongCurve>,
) -> Result<f64> {
    let m = engine.m;
    let mut acc = engine.index_integral(w, w)?;
    if let Some(field) = transverse_acc {
        let span = geo.span;
        for (t, sign) in [(span[1], 1.0), (span[0], -1.0)] {
            let (x, v) = geo.state(t);
            let g = m.fundamental_tensor(&x, &v)?;
            let side = if sign > 0.0 { Side::Left } else { Side::Right };
            let a = field.value(t, Some(side))?;
            acc += sign * g.inner(&a, &v);
        }
    }
    Ok(acc)
}

/// Report of [`critical_point_test`].
#[derive(Clone, Debug)]
pub struct CriticalityReport {
    pub max_geodesic_residual: f64,
    pub max_legendre_jump: f64,
    pub orthogonality_start: f64,
    pub orthogonality_end: f64,
    pub tolerance: f64,
    pub critical: bool,
}

/// Tests whether a curve with endpoints on `P` and `Q` is a critical point
/// of the energy: piecewise geodesic, Legendre-continuous at breaks, and
/// `g_γ̇`-orthogonal to the endmanifolds.
pub fn critical_point_test(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    p: &SubmanifoldPatch,
    q: &SubmanifoldPatch,
    samples: usize,
    tolerance: f64,
) -> Result<CriticalityReport> {
    let span = curve.span();
    let start = curve.position(span[0], Some(Side::Right))?;
    let end = curve.position(span[1], Some(Side::Left))?;
    let (up, dp) = p.locate(&start);
    if dp > 1e-9 {
        return Err(Error::EndpointNotOnSubmanifold { dist: dp });
    }
    let (uq, dq) = q.locate(&end);
    if dq > 1e-9 {
        return Err(Error::EndpointNotOnSubmanifold { dist: dq });
    }

    let mut max_res: f64 = 0.0;
    let mut edges = vec![span[0]];
    edges.extend(curve.breaks());
    edges.push(span[1]);
    for win in edges.windows(2) {
        for k in 0..samples.max(2) {
            let f = (k as f64 + 0.5) / samples.max(2) as f64;
            let t = win[0] + (win[1] - win[0]) * f;
            let dv = velocity_covariant_derivative(m, curve, t, Some(Side::Left))?;
            let v = curve.velocity(t, Some(Side::Left))?;
            let scale = v.iter().map(|c| c * c).sum::<f64>().max(1e-12);
            max_res = max_res.max(dv.iter().map(|c| c * c).sum::<f64>().sqrt() / scale);
        }
    }

    let mut max_jump: f64 = 0.0;
    for t in curve.breaks() {
        let x = curve.position(t, Some(Side::Left))?;
        let l_plus = legendre(m, &x, &curve.velocity(t, Some(Side::Right))?)?;
        let l_minus = legendre(m, &x, &curve.velocity(t, Some(Side::Left))?)?;
        for i in 0..m.dim() {
            max_jump = max_jump.max((l_plus[i] - l_minus[i]).abs());
        }
    }

    let v_start = curve.velocity(span[0], Some(Side::Right))?;
    let (_, res_p) = submanifold::is_normal(m, p, &up, &v_start)?;
    let v_end = curve.velocity(span[1], Some(Side::Left))?;
    let (_, res_q) = submanifold::is_normal(m, q, &uq, &v_end)?;

    let critical = max_res <= tolerance
        && max_jump <= tolerance
        && res_p <= tolerance
        && res_q <= tolerance;
    Ok(CriticalityReport {
        max_geodesic_residual: max_res,
        max_legendre_jump: max_jump,
        orthogonality_start: res_p,
        orthogonality_end: res_q,
        tolerance,
        critical,
    })
}

/// The (P, Q)-index form
///
/// ```text
/// I(V, W) = ∫ (−g(Rᵞ(γ̇,V)W, γ̇) + g(V′,W′)) dt
///            − g_a(S^P_{γ̇(a)}(V,W), γ̇(a)) + g_b(S^Q_{γ̇(b)}(V,W), γ̇(b))
/// ```
///
/// for fields with endpoints tangent to `P` and `Q`; symmetric and bilinear.
/// The boundary-term orientation matches the kernel characterization
/// `tan_γ̇ V′(a) = S̃^P(V(a))`, `tan_γ̇ V′(b) = S̃^Q(V(b))`.
pub fn index_form(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    p: &SubmanifoldPatch,
    q: &SubmanifoldPatch,
    v_field: &VectorFieldAlongCurve,
    w_field: &VectorFieldAlongCurve,
) -> Result<f64> {
    let engine = GeodesicQuadrature::new(m, geo)?;
    index_form_with(&engine, geo, p, q, v_field, w_field)
}

/// Index form using a prebuilt quadrature cache.
pub fn index_form_with(
    engine: &GeodesicQuadrature,
    geo: &GeodesicRecord,
    p: &SubmanifoldPatch,
    q: &SubmanifoldPatch,
    v_field: &VectorFieldAlongCurve,
    w_field: &VectorFieldAlongCurve,
) -> Result<f64> {
    let m = engine.m;
    let span = geo.span;
    let mut acc = engine.index_integral(v_field, w_field)?;
    for (t, sign, patch) in [(span[0], -1.0, p), (span[1], 1.0, q)] {
        let (x, gdot) = geo.state(t);
        let (u, dist) = patch.locate(&x);
        if dist > 1e-9 {
            return Err(Error::EndpointNotOnSubmanifold { dist });
        }
        let (normal, res) = submanifold::is_normal(m, patch, &u, &gdot)?;
        if !normal && res > 1e-7 {
            return Err(Error::NotOrthogonal { residual: res });
        }
        let side = if sign < 0.0 { Side::Right } else { Side::Left };
        let vv = v_field.value(t, Some(side))?;
        let wv = w_field.value(t, Some(side))?;
        if patch.dim_param() == 0 {
            for comp in vv.iter().chain(wv.iter()) {
                if comp.abs() > 1e-7 {
                    return Err(Error::NotTangent { residual: comp.abs() });
                }
            }
            continue;
        }
        let s = submanifold::second_fundamental_form(m, patch, &u, &gdot, &vv, &wv)?;
        let g = m.fundamental_tensor(&x, &gdot)?;
        acc += sign * g.inner(&s, &gdot);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geodesic::integrate_geodesic;
    use crate::ode::OdeOptions;
    use crate::submanifold::{line_patch, point_patch};
    use serde_json::Value;
    use std::f64::consts::PI;

    #[test]
    fn energy_closed_forms() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let line = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, 0.0]).unwrap();
        assert!((energy(&m, &line).unwrap() - 0.5).abs() < 1e-12);

        let parabola = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, t * t]).unwrap();
        assert!((energy(&m, &parabola).unwrap() - 7.0 / 6.0).abs() < 1e-9);

        let pe = catalog::build("pseudo_euclidean", &Value::Null).unwrap();
        let light = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, t]).unwrap();
        assert!(energy(&pe, &light).unwrap().abs() < 1e-12);
    }

    #[test]
    fn legendre_values() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let l = legendre(&m, &[0.0, 0.0], &[1.0, 2.0]).unwrap();
        // ℒ(v)(w) = ⟨v, w⟩ in flat space: pair with w = (3, 4)
        assert!((l[0] * 3.0 + l[1] * 4.0 - 11.0).abs() < 1e-12);

        let q = catalog::build("quartic", &Value::Null).unwrap();
        let l = legendre(&q, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(
            (l[0] - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-12,
            "{l:?}"
        );
    }

    #[test]
    fn first_variation_parabola_matches_closed_form() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let curve = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, t * t]).unwrap();
        let w =
            VectorFieldAlongCurve::from_closure(&curve, |t| vec![0.0, (PI * t).sin()]).unwrap();
        let dv = first_variation(&m, &curve, &w).unwrap();
        assert!((dv + 4.0 / PI).abs() < 1e-7, "dE = {dv}");
        let fd = energy_first_fd(&m, &curve, &w, 1e-4).unwrap();
        assert!((dv - fd).abs() < 1e-7, "formula {dv} vs fd {fd}");
    }

    #[test]
    fn broken_line_jump_term() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let curve = PiecewiseCurve::from_closure_with_breaks([0.0, 2.0], &[1.0], |t| {
            if t <= 1.0 {
                vec![t, 0.0]
            } else {
                vec![1.0, t - 1.0]
            }
        })
        .unwrap();
        // W vanishing at both ends, equal to (0, 1) at the corner
        let w = VectorFieldAlongCurve::from_closure(&curve, |t| {
            vec![0.0, 1.0 - (t - 1.0) * (t - 1.0)]
        })
        .unwrap();
        let dv = first_variation(&m, &curve, &w).unwrap();
        // straight pieces and vanishing ends leave only the Legendre jump,
        // of unit magnitude for this right-angle corner; closed-form energy
        // of the family is E(s) = 1 − s + 4s²/3, so dE/ds = −1
        assert!((dv + 1.0).abs() < 1e-8, "dE = {dv}");
        let fd = energy_first_fd(&m, &curve, &w, 1e-4).unwrap();
        assert!((dv - fd).abs() < 1e-6, "formula {dv} vs fd {fd}");
    }

    #[test]
    fn second_variation_flat_sine() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let geo = integrate_geodesic(
            &m,
            &[0.0, 0.0],
            &[1.0, 0.0],
            [0.0, 1.0],
            &OdeOptions::default(),
        )
        .unwrap();
        let curve = geo.to_curve();
        let w =
            VectorFieldAlongCurve::from_closure(&curve, |t| vec![0.0, (PI * t).sin()]).unwrap();
        let e2 = second_variation(&m, &geo, &w, None).unwrap();
        assert!((e2 - PI * PI / 2.0).abs() < 1e-7, "E'' = {e2}");
        let fd = energy_second_fd(&m, &curve, &w, 1e-3).unwrap();
        assert!((e2 - fd).abs() < 1e-5, "formula {e2} vs fd {fd}");
    }

    #[test]
    fn criticality_of_orthogonal_segment() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let p = line_patch(vec![0.0, 0.0], vec![0.0, 1.0]);
        let q = line_patch(vec![1.0, 0.0], vec![0.0, 1.0]);
        let seg = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, 0.0]).unwrap();
        let rep = critical_point_test(&m, &seg, &p, &q, 16, 1e-6).unwrap();
        assert!(rep.critical, "{rep:?}");

        // tilt by ~10 degrees: orthogonality fails
        let tilted = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, 0.18 * t]).unwrap();
        let q2 = line_patch(vec![1.0, 0.18], vec![0.0, 1.0]);
        let rep = critical_point_test(&m, &tilted, &p, &q2, 16, 1e-6).unwrap();
        assert!(!rep.critical);
        assert!(rep.orthogonality_start > 1e-3 || rep.orthogonality_end > 1e-3);
    }

    #[test]
    fn index_form_point_to_point_matches_second_variation() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let geo = integrate_geodesic(
            &m,
            &[0.0, 0.0],
            &[1.0, 0.0],
            [0.0, 1.0],
            &OdeOptions::default(),
        )
        .unwrap();
        let curve = geo.to_curve();
        let p = point_patch(vec![0.0, 0.0]);
        let q = point_patch(vec![1.0, 0.0]);
        let w =
            VectorFieldAlongCurve::from_closure(&curve, |t| vec![0.0, (PI * t).sin()]).unwrap();
        let i = index_form(&m, &geo, &p, &q, &w, &w).unwrap();
        assert!((i - PI * PI / 2.0).abs() < 1e-7, "I = {i}");
    }
}
