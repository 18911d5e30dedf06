//! The Jacobi operator by two independent routes, and flag curvature.
//!
//! The spray route builds the curvature matrix from derivatives of the spray
//! coefficients; the variational route evaluates the commutator of covariant
//! derivatives along an explicit two-parameter variation. The sign is fixed
//! so that the Jacobi equation reads `J″ = Rᵞ(γ̇, J)γ̇` — on the unit sphere
//! with `‖v‖ = 1` and `w ⊥ v` both routes return `Rᵞ(v,w)v = −w` — and the
//! cross-route agreement is part of the validation suite.

use crate::connection::{christoffel_s, spray_s};
use crate::curve::{PiecewiseCurve, Side, VectorFieldAlongCurve};
use crate::error::{Error, Result};
use crate::geodesic::integrate_geodesic;
use crate::jets::{Jet, JetShape};
use crate::metric::MetricDefinition;
use crate::ode::OdeOptions;

/// Orientation of the spray-curvature matrix relative to the Jacobi
/// equation `J″ = Rᵞ(γ̇,J)γ̇`; calibrated once against the variational route
/// on the round sphere.
const SPRAY_SIGN: f64 = -1.0;

/// Linear map `w ↦ Rᵞ(v, w)v` at a base point.
pub struct JacobiOperator {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    dim: usize,
    /// Row-major matrix of the operator.
    r: Vec<f64>,
}

impl JacobiOperator {
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|k| self.r[i * n + k] * w[k]).sum())
            .collect()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.r
    }
}

/// Spray-route Jacobi operator:
///
/// ```text
/// Rⁱₖ = 2 ∂Gⁱ/∂xᵏ − vʲ ∂²Gⁱ/∂xʲ∂vᵏ + 2 Gʲ ∂²Gⁱ/∂vʲ∂vᵏ − (∂Gⁱ/∂vʲ)(∂Gʲ/∂vᵏ)
/// ```
///
/// with the sign convention above; tensorial (linear) in `w`.
pub fn jacobi_operator_spray(
    m: &MetricDefinition,
    x: &[f64],
    v: &[f64],
) -> Result<JacobiOperator> {
    m.check_admissible(x, v, None)?;
    let n = m.dim();
    let shape = JetShape::get(2, 2)?;

    let mut g_val = vec![0.0; n];
    let mut dg_dx = vec![0.0; n * n]; // [j][i] = ∂Gⁱ/∂xʲ
    let mut dg_dv = vec![0.0; n * n]; // [j][i] = ∂Gⁱ/∂vʲ
    let mut d2_xv = vec![0.0; n * n * n]; // [j][k][i] = ∂²Gⁱ/∂xʲ∂vᵏ
    let mut d2_vv = vec![0.0; n * n * n]; // [j][k][i] = ∂²Gⁱ/∂vʲ∂vᵏ

    for j in 0..n {
        for k in 0..n {
            let mut xj: Vec<Jet> = x.iter().map(|&c| Jet::constant(shape, c)).collect();
            let mut vj: Vec<Jet> = v.iter().map(|&c| Jet::constant(shape, c)).collect();
            xj[j].add_seed(0, 1.0);
            vj[k].add_seed(1, 1.0);
            let g = spray_s(m, &xj, &vj)?;
            for (i, gi) in g.iter().enumerate() {
                if j == 0 && k == 0 {
                    g_val[i] = gi.coeff(&[0, 0]);
                }
                if k == 0 {
                    dg_dx[j * n + i] = gi.partial(&[1, 0]);
                }
                if j == 0 {
                    dg_dv[k * n + i] = gi.partial(&[0, 1]);
                }
                d2_xv[(j * n + k) * n + i] = gi.partial(&[1, 1]);
            }
        }
    }
    for j in 0..n {
        for k in j..n {
            let values: Vec<f64> = if j == k {
                let shape1 = JetShape::get(1, 2)?;
                let xj: Vec<Jet> = x.iter().map(|&c| Jet::constant(shape1, c)).collect();
                let mut vj: Vec<Jet> = v.iter().map(|&c| Jet::constant(shape1, c)).collect();
                vj[j].add_seed(0, 1.0);
                let g = spray_s(m, &xj, &vj)?;
                g.iter().map(|gi| gi.partial(&[2])).collect()
            } else {
                let xj: Vec<Jet> = x.iter().map(|&c| Jet::constant(shape, c)).collect();
                let mut vj: Vec<Jet> = v.iter().map(|&c| Jet::constant(shape, c)).collect();
                vj[j].add_seed(0, 1.0);
                vj[k].add_seed(1, 1.0);
                let g = spray_s(m, &xj, &vj)?;
                g.iter().map(|gi| gi.partial(&[1, 1])).collect()
            };
            for (i, &val) in values.iter().enumerate() {
                d2_vv[(j * n + k) * n + i] = val;
                d2_vv[(k * n + j) * n + i] = val;
            }
        }
    }

    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let mut acc = 2.0 * dg_dx[k * n + i];
            for j in 0..n {
                acc -= v[j] * d2_xv[(j * n + k) * n + i];
                acc += 2.0 * g_val[j] * d2_vv[(j * n + k) * n + i];
                acc -= dg_dv[j * n + i] * dg_dv[k * n + j];
            }
            r[i * n + k] = SPRAY_SIGN * acc;
        }
    }
    Ok(JacobiOperator {
        x: x.to_vec(),
        v: v.to_vec(),
        dim: n,
        r,
    })
}

/// A two-parameter chart-linear variation `Λ(t, s) = γ(t) + s·W(t) + s²·W₂(t)`
/// of a base curve, with evaluators for the map and its longitudinal and
/// transverse velocities. The variational curvature route evaluates the
/// commutator of covariant derivatives on such a surface.
pub struct VariationSurface<'a> {
    curve: &'a PiecewiseCurve,
    w: &'a VectorFieldAlongCurve,
    w2: Option<&'a VectorFieldAlongCurve>,
}

impl<'a> VariationSurface<'a> {
    pub fn new(
        curve: &'a PiecewiseCurve,
        w: &'a VectorFieldAlongCurve,
    ) -> Result<VariationSurface<'a>> {
        if !w.shares_breaks_with(curve) {
            return Err(Error::BreakMismatch);
        }
        Ok(VariationSurface {
            curve,
            w,
            w2: None,
        })
    }

    /// Adds a quadratic-in-s term; the operator must not depend on it, which
    /// the validation suite verifies by comparing surfaces.
    pub fn with_quadratic_term(
        curve: &'a PiecewiseCurve,
        w: &'a VectorFieldAlongCurve,
        w2: &'a VectorFieldAlongCurve,
    ) -> Result<VariationSurface<'a>> {
        if !w.shares_breaks_with(curve) || !w2.shares_breaks_with(curve) {
            return Err(Error::BreakMismatch);
        }
        Ok(VariationSurface {
            curve,
            w,
            w2: Some(w2),
        })
    }

    pub fn base(&self) -> &PiecewiseCurve {
        self.curve
    }

    pub fn variational_field(&self) -> &VectorFieldAlongCurve {
        self.w
    }

    /// `Λ(t, s)`.
    pub fn position(&self, t: f64, s: f64) -> Result<Vec<f64>> {
        let side = interior_side(self.curve, t);
        let p = self.curve.position(t, side)?;
        let w = self.w.value(t, side)?;
        let w2 = self.quadratic_value(t)?;
        Ok((0..p.len())
            .map(|i| p[i] + s * w[i] + s * s * w2[i])
            .collect())
    }

    /// `Λ_t(t, s)` — the longitudinal velocity.
    pub fn longitudinal(&self, t: f64, s: f64) -> Result<Vec<f64>> {
        let side = interior_side(self.curve, t);
        let v = self.curve.velocity(t, side)?;
        let wd = self.w.derivative(t, 1, side)?;
        let w2d = match self.w2 {
            Some(f) => f.derivative(t, 1, side)?,
            None => vec![0.0; v.len()],
        };
        Ok((0..v.len())
            .map(|i| v[i] + s * wd[i] + s * s * w2d[i])
            .collect())
    }

    /// `Λ_s(t, s)` — the transverse velocity.
    pub fn transverse(&self, t: f64, s: f64) -> Result<Vec<f64>> {
        let side = interior_side(self.curve, t);
        let w = self.w.value(t, side)?;
        let w2 = self.quadratic_value(t)?;
        Ok((0..w.len()).map(|i| w[i] + 2.0 * s * w2[i]).collect())
    }

    fn quadratic_value(&self, t: f64) -> Result<Vec<f64>> {
        let side = interior_side(self.curve, t);
        match self.w2 {
            Some(f) => f.value(t, side),
            None => Ok(vec![0.0; self.w.dim()]),
        }
    }

    /// Checks L-admissibility of the longitudinal velocities over a (t, s)
    /// probe grid.
    pub fn check_admissible(
        &self,
        m: &MetricDefinition,
        s_extent: f64,
        probes: usize,
    ) -> Result<()> {
        let span = self.curve.span();
        for i in 0..=probes {
            let t = span[0] + (span[1] - span[0]) * i as f64 / probes as f64;
            for k in 0..=4 {
                let s = s_extent * (k as f64 / 2.0 - 1.0);
                let x = self.position(t, s)?;
                let v = self.longitudinal(t, s)?;
                m.check_admissible(&x, &v, Some(t))?;
            }
        }
        Ok(())
    }
}

/// Variational-route Jacobi operator `Rᵞ(γ̇, W)Z` at `t`, evaluated on the
/// chart-linear variation `Λ(t, s) = γ(t) + s·W(t)` with `Z` extended
/// constant in `s`; `s`-derivatives are taken by jets.
pub fn jacobi_operator_variational(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    w_field: &VectorFieldAlongCurve,
    z_field: &VectorFieldAlongCurve,
    t: f64,
) -> Result<Vec<f64>> {
    let side = interior_side(curve, t);
    let n = m.dim();
    let p = curve.position(t, side)?;
    let gdot_jets = curve.velocity_jets(m, t, 1, side)?;
    let gdot: Vec<f64> = gdot_jets.iter().map(|j| j.value()).collect();
    let gddot: Vec<f64> = gdot_jets.iter().map(|j| j.coeff(&[1])).collect();
    m.check_admissible(&p, &gdot, Some(t))?;
    let wj = w_field.jets(t, 1, side)?;
    let zj = z_field.jets(t, 1, side)?;
    let w: Vec<f64> = wj.iter().map(|j| j.value()).collect();
    let wdot: Vec<f64> = wj.iter().map(|j| j.coeff(&[1])).collect();
    let z: Vec<f64> = zj.iter().map(|j| j.value()).collect();
    let zdot: Vec<f64> = zj.iter().map(|j| j.coeff(&[1])).collect();

    let gamma0 = christoffel_s::<f64>(m, &p, &gdot)?;

    // Γ along the base curve, derivative in t
    let shape1 = JetShape::get(1, 1)?;
    let xt: Vec<Jet> = p
        .iter()
        .zip(&gdot)
        .map(|(&pc, &vc)| {
            let mut j = Jet::constant(shape1, pc);
            j.set_coeff(&[1], vc);
            j
        })
        .collect();
    let vt: Vec<Jet> = gdot
        .iter()
        .zip(&gddot)
        .map(|(&vc, &ac)| {
            let mut j = Jet::constant(shape1, vc);
            j.set_coeff(&[1], ac);
            j
        })
        .collect();
    let gamma_t = christoffel_s::<Jet>(m, &xt, &vt)?;

    // Γ along the transverse curve, derivative in s
    let xs: Vec<Jet> = p
        .iter()
        .zip(&w)
        .map(|(&pc, &wc)| {
            let mut j = Jet::constant(shape1, pc);
            j.set_coeff(&[1], wc);
            j
        })
        .collect();
    let vs: Vec<Jet> = gdot
        .iter()
        .zip(&wdot)
        .map(|(&vc, &wc)| {
            let mut j = Jet::constant(shape1, vc);
            j.set_coeff(&[1], wc);
            j
        })
        .collect();
    let gamma_s = christoffel_s::<Jet>(m, &xs, &vs)?;

    let g0 = |k: usize, i: usize, j: usize| gamma0[(k * n + i) * n + j];
    let gt = |k: usize, i: usize, j: usize| gamma_t[(k * n + i) * n + j].coeff(&[1]);
    let gs = |k: usize, i: usize, j: usize| gamma_s[(k * n + i) * n + j].coeff(&[1]);

    // A = D_{βt} Z̃ along the variation, to first order in t at s = 0
    let mut a0 = vec![0.0; n];
    let mut da = vec![0.0; n];
    // B = D_{γs} Z̃, to first order in s at s = 0
    let mut b0 = vec![0.0; n];
    let mut db = vec![0.0; n];
    for k in 0..n {
        b0[k] = zdot[k];
        for i in 0..n {
            for j in 0..n {
                a0[k] += z[i] * w[j] * g0(k, i, j);
                da[k] += (zdot[i] * w[j] + z[i] * wdot[j]) * g0(k, i, j)
                    + z[i] * w[j] * gt(k, i, j);
                b0[k] += z[i] * gdot[j] * g0(k, i, j);
                db[k] += z[i] * wdot[j] * g0(k, i, j) + z[i] * gdot[j] * gs(k, i, j);
            }
        }
    }
    let mut out = vec![0.0; n];
    for k in 0..n {
        let mut d_gs_a = da[k];
        let mut d_bt_b = db[k];
        for i in 0..n {
            for j in 0..n {
                d_gs_a += a0[i] * gdot[j] * g0(k, i, j);
                d_bt_b += b0[i] * w[j] * g0(k, i, j);
            }
        }
        out[k] = d_gs_a - d_bt_b;
    }
    Ok(out)
}

/// Variational-route operator evaluated by central finite differences over
/// an explicit [`VariationSurface`].
///
/// Exercises the full variation including its second-order-in-s terms, which
/// the jet route structurally cannot depend on; comparing surfaces with
/// different quadratic terms is the executable form of the claim that the
/// operator does not depend on the choice of variation.
pub fn jacobi_operator_variational_fd(
    m: &MetricDefinition,
    surface: &VariationSurface,
    z_field: &VectorFieldAlongCurve,
    t: f64,
    h: f64,
) -> Result<Vec<f64>> {
    let curve = surface.base();
    let side = interior_side(curve, t);
    let n = m.dim();

    let lambda = |t: f64, s: f64| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        Ok((
            surface.position(t, s)?,
            surface.longitudinal(t, s)?,
            surface.transverse(t, s)?,
        ))
    };

    // A(t, s) = Z̃ⁱ Λ_sʲ Γᵏᵢⱼ(Λ, Λ_t)   (∂_s Z̃ = 0)
    let a_at = |tt: f64, s: f64| -> Result<Vec<f64>> {
        let (pos, vel, trans) = lambda(tt, s)?;
        let z = z_field.value(tt, side)?;
        let gamma = christoffel_s::<f64>(m, &pos, &vel)?;
        let mut a = vec![0.0; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    a[k] += z[i] * trans[j] * gamma[(k * n + i) * n + j];
                }
            }
        }
        Ok(a)
    };
    // B(t, s) = Żᵏ + Z̃ⁱ Λ_tʲ Γᵏᵢⱼ(Λ, Λ_t)
    let b_at = |tt: f64, s: f64| -> Result<Vec<f64>> {
        let (pos, vel, _) = lambda(tt, s)?;
        let z = z_field.value(tt, side)?;
        let zd = z_field.derivative(tt, 1, side)?;
        let gamma = christoffel_s::<f64>(m, &pos, &vel)?;
        let mut b = zd;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    b[k] += z[i] * vel[j] * gamma[(k * n + i) * n + j];
                }
            }
        }
        Ok(b)
    };

    let (pos0, vel0, trans0) = lambda(t, 0.0)?;
    let gamma0 = christoffel_s::<f64>(m, &pos0, &vel0)?;
    let a0 = a_at(t, 0.0)?;
    let b0 = b_at(t, 0.0)?;
    let ap = a_at(t + h, 0.0)?;
    let am = a_at(t - h, 0.0)?;
    let bp = b_at(t, h)?;
    let bm = b_at(t, -h)?;

    let mut out = vec![0.0; n];
    for k in 0..n {
        let da = (ap[k] - am[k]) / (2.0 * h);
        let db = (bp[k] - bm[k]) / (2.0 * h);
        let mut d_gs_a = da;
        let mut d_bt_b = db;
        for i in 0..n {
            for j in 0..n {
                d_gs_a += a0[i] * vel0[j] * gamma0[(k * n + i) * n + j];
                d_bt_b += b0[i] * trans0[j] * gamma0[(k * n + i) * n + j];
            }
        }
        out[k] = d_gs_a - d_bt_b;
    }
    Ok(out)
}

fn interior_side(curve: &PiecewiseCurve, t: f64) -> Option<Side> {
    let span = curve.span();
    if (t - span[0]).abs() < 1e-12 {
        Some(Side::Right)
    } else if (t - span[1]).abs() < 1e-12 {
        Some(Side::Left)
    } else {
        Some(Side::Right)
    }
}

/// Flag curvature by the spray route:
///
/// ```text
/// K_v(w) = −g_v(Rᵞ(v,w)v, w) / (L(v) g_v(w,w) − g_v(v,w)²)
/// ```
pub fn flag_curvature(m: &MetricDefinition, x: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    let l = m.evaluate(x, v)?;
    let g = m.fundamental_tensor(x, v)?;
    let den = l * g.inner(w, w) - g.inner(v, w).powi(2);
    let scale = (l * g.inner(w, w)).abs() + g.inner(v, w).powi(2);
    if den.abs() < 1e-12 * scale.max(1e-300) {
        return Err(Error::DegenerateFlag { denom: den });
    }
    let op = jacobi_operator_spray(m, x, v)?;
    Ok(-g.inner(&op.apply(w), w) / den)
}

/// Flag curvature by the variational route: integrates a short geodesic
/// through `(x, v)` and evaluates `g_v(Rᵞ(γ̇,W)W, v)` over the denominator.
pub fn flag_curvature_variational(
    m: &MetricDefinition,
    x: &[f64],
    v: &[f64],
    w: &[f64],
    opts: &OdeOptions,
) -> Result<f64> {
    let l = m.evaluate(x, v)?;
    let g = m.fundamental_tensor(x, v)?;
    let den = l * g.inner(w, w) - g.inner(v, w).powi(2);
    let scale = (l * g.inner(w, w)).abs() + g.inner(v, w).powi(2);
    if den.abs() < 1e-12 * scale.max(1e-300) {
        return Err(Error::DegenerateFlag { denom: den });
    }
    let vnorm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
    let geo = integrate_geodesic(m, x, v, [0.0, 0.1 / vnorm], opts)?;
    let curve = geo.to_curve();
    let w_field = VectorFieldAlongCurve::constant(&curve, w)?;
    let r = jacobi_operator_variational(m, &curve, &w_field, &w_field, 0.0)?;
    Ok(g.inner(&r, v) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use serde_json::Value;

    #[test]
    fn flat_metrics_have_zero_operator() {
        for id in ["euclidean", "quartic"] {
            let m = catalog::build(id, &Value::Null).unwrap();
            let op = jacobi_operator_spray(&m, &[0.1, 0.2], &[0.9, 0.7]).unwrap();
            assert!(
                op.matrix().iter().all(|&r| r.abs() < 1e-10),
                "{id}: {:?}",
                op.matrix()
            );
        }
    }

    #[test]
    fn sphere_operator_is_minus_identity_on_normals() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let x = [std::f64::consts::FRAC_PI_2, 0.0];
        // unit-speed equator velocity, unit normal = ∂θ
        let v = [0.0, 1.0];
        let w = [1.0, 0.0];
        let op = jacobi_operator_spray(&m, &x, &v).unwrap();
        let rw = op.apply(&w);
        assert!((rw[0] + 1.0).abs() < 1e-10, "{rw:?}");
        assert!(rw[1].abs() < 1e-10);
    }

    #[test]
    fn routes_agree_on_the_sphere() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let x = [1.1, 0.3];
        let v = [0.4, 0.8];
        let w = [1.0, -0.2];
        let geo =
            integrate_geodesic(&m, &x, &v, [0.0, 0.3], &OdeOptions::default()).unwrap();
        let curve = geo.to_curve();
        let wf = VectorFieldAlongCurve::constant(&curve, &w).unwrap();
        let gdot = VectorFieldAlongCurve::from_closure(&curve, |t| geo.velocity(t)).unwrap();
        let spray_op = jacobi_operator_spray(&m, &x, &v).unwrap();
        let via_spray = spray_op.apply(&w);
        let via_var = jacobi_operator_variational(&m, &curve, &wf, &gdot, 0.0).unwrap();
        for i in 0..2 {
            assert!(
                (via_spray[i] - via_var[i]).abs() < 1e-7,
                "component {i}: {via_spray:?} vs {via_var:?}"
            );
        }
    }

    #[test]
    fn flag_curvature_constant_spaces() {
        let sphere = catalog::build("sphere", &Value::Null).unwrap();
        let k = flag_curvature(&sphere, &[0.9, 0.4], &[0.3, 1.1], &[1.0, 0.2]).unwrap();
        assert!((k - 1.0).abs() < 1e-9, "sphere K = {k}");

        let hyp = catalog::build("hyperbolic", &Value::Null).unwrap();
        let k = flag_curvature(&hyp, &[0.2, -0.1], &[0.5, 0.8], &[1.0, -0.4]).unwrap();
        assert!((k + 1.0).abs() < 1e-9, "hyperbolic K = {k}");

        let eu = catalog::build("euclidean", &Value::Null).unwrap();
        let k = flag_curvature(&eu, &[0.0, 0.0], &[1.0, 0.4], &[0.2, 1.0]).unwrap();
        assert!(k.abs() < 1e-10, "euclidean K = {k}");
    }

    #[test]
    fn degenerate_flag_is_rejected() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        // w parallel to v makes the flag degenerate
        let r = flag_curvature(&m, &[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]);
        assert!(matches!(r, Err(Error::DegenerateFlag { .. })));
    }
}
