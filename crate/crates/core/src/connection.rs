//! Chern-connection data: spray coefficients, nonlinear connection,
//! Christoffel symbols, and the induced covariant derivative along curves.
//!
//! The Christoffel symbols are assembled from the standard spray /
//! nonlinear-connection construction,
//!
//! ```text
//! Gⁱ = ¼ gⁱˡ (∂²L/∂vˡ∂xᵐ vᵐ − ∂L/∂xˡ)          (Euler–Lagrange reduction)
//! Nⁱⱼ = ∂Gⁱ/∂vʲ
//! Γᵏᵢⱼ = ½ gᵏˢ (δg_sj/δxⁱ + δg_si/δxʲ − δg_ij/δxˢ),   δ/δxⁱ = ∂/∂xⁱ − Nᵐᵢ ∂/∂vᵐ
//! ```
//!
//! which is torsion-free and almost g-compatible; the property suite checks
//! both axioms directly rather than trusting the formula. All pipelines are
//! generic over [`Scalar`], so evaluating them at jet-valued base points
//! yields their exact derivatives (used by the curvature routes and by
//! time-derivatives along curves).

use crate::curve::{PiecewiseCurve, Side, VectorFieldAlongCurve};
use crate::error::{Error, Result};
use crate::jets::{lift, Dir, Jet, JetShape, Scalar};
use crate::metric::{cartan_s, dg_dx_s, fundamental_s, invert_s, MetricDefinition};

/// Spray coefficients and nonlinear connection at a base point.
pub struct SprayData {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Gⁱ, length n.
    pub coefficients: Vec<f64>,
    /// Nⁱⱼ = ∂Gⁱ/∂vʲ, row-major n×n.
    pub nonlinear: Vec<f64>,
}

/// Christoffel symbols Γᵏᵢⱼ at a base point, symmetric in (i, j).
pub struct ChristoffelField {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    dim: usize,
    /// Dense components, index `(k·n + i)·n + j`.
    gamma: Vec<f64>,
}

impl ChristoffelField {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.dim + i) * self.dim + j]
    }

    pub fn components(&self) -> &[f64] {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Spray coefficients `Gⁱ` over a generic scalar.
pub fn spray_s<S: Scalar>(m: &MetricDefinition, x: &[S], v: &[S]) -> Result<Vec<S>> {
    let n = m.dim();
    let g = fundamental_s(m, x, v)?;
    let g_inv = invert_s(&g, n, m.degeneracy_threshold())?;
    let zero = x[0].cst(0.0);
    // rhs_l = Σ_m ∂²L/∂vˡ∂xᵐ vᵐ − ∂L/∂xˡ ;  ∂L/∂xᵐ shared from the l = 0 lifts
    let mut rhs = vec![zero.clone(); n];
    let mut dl_dx = vec![zero.clone(); n];
    for l in 0..n {
        let mut acc = zero.clone();
        for mm in 0..n {
            let lifted = lift(m.lagrangian(), x, v, &[Dir::V(l), Dir::X(mm)], 2)?;
            acc = acc + lifted.partial(&[1, 1]) * v[mm].clone();
            if l == 0 {
                dl_dx[mm] = lifted.partial(&[0, 1]);
            }
        }
        rhs[l] = acc;
    }
    for l in 0..n {
        rhs[l] = rhs[l].clone() - dl_dx[l].clone();
    }
    let mut big_g = vec![zero; n];
    for i in 0..n {
        let mut acc = x[0].cst(0.0);
        for l in 0..n {
            acc = acc + g_inv[i * n + l].clone() * rhs[l].clone();
        }
        big_g[i] = acc.scale(0.25);
    }
    Ok(big_g)
}

/// Spray and its v-derivatives: returns `(Gⁱ, Nⁱⱼ)` with `Nⁱⱼ = ∂Gⁱ/∂vʲ`,
/// obtained by running the spray pipeline at a jet-extended base point.
pub fn spray_with_nonlinear_s<S: Scalar>(
    m: &MetricDefinition,
    x: &[S],
    v: &[S],
) -> Result<(Vec<S>, Vec<S>)> {
    let n = m.dim();
    let zero = x[0].cst(0.0);
    let mut big_g = vec![zero.clone(); n];
    let mut nonlinear = vec![zero; n * n];
    for j in 0..n {
        let (g_col, dg_col) = pipeline_v_derivative(m, x, v, j, spray_s::<Jet>)?;
        for i in 0..n {
            nonlinear[i * n + j] = dg_col[i].clone();
            if j == 0 {
                big_g[i] = g_col[i].clone();
            }
        }
    }
    Ok((big_g, nonlinear))
}

/// Runs an `(x, v) → ℝⁿ` pipeline at a base point extended by one seeded
/// v-direction and returns the pipeline values and their derivatives along
/// that direction.
fn pipeline_v_derivative<S: Scalar>(
    m: &MetricDefinition,
    x: &[S],
    v: &[S],
    dir: usize,
    pipeline: impl Fn(&MetricDefinition, &[Jet], &[Jet]) -> Result<Vec<Jet>>,
) -> Result<(Vec<S>, Vec<S>)> {
    let own_dims = x[0].jet_dims();
    let own_order = x[0].jet_order();
    let shape = JetShape::get(own_dims + 1, own_order + 1)?;
    let xe: Vec<Jet> = x.iter().map(|s| s.promote(shape)).collect();
    let mut ve: Vec<Jet> = v.iter().map(|s| s.promote(shape)).collect();
    ve[dir].add_seed(own_dims, 1.0);
    let out = pipeline(m, &xe, &ve)?;
    let shifted = 5usize.pow(own_dims as u32);
    let values: Vec<S> = out.iter().map(|j| S::demote(j, &x[0], 0)).collect();
    let derivs: Vec<S> = out.iter().map(|j| S::demote(j, &x[0], shifted)).collect();
    Ok((values, derivs))
}

/// Spray data at `(x, v)`.
pub fn spray(m: &MetricDefinition, x: &[f64], v: &[f64]) -> Result<SprayData> {
    m.check_admissible(x, v, None)?;
    let (g, n_mat) = spray_with_nonlinear_s::<f64>(m, x, v)?;
    Ok(SprayData {
        x: x.to_vec(),
        v: v.to_vec(),
        coefficients: g,
        nonlinear: n_mat,
    })
}

/// Christoffel symbols over a generic scalar, dense `n³`, index
/// `(k·n + i)·n + j`.
pub fn christoffel_s<S: Scalar>(m: &MetricDefinition, x: &[S], v: &[S]) -> Result<Vec<S>> {
    let n = m.dim();
    let g = fundamental_s(m, x, v)?;
    let g_inv = invert_s(&g, n, m.degeneracy_threshold())?;
    let (_, n_mat) = spray_with_nonlinear_s(m, x, v)?;
    let cartan = cartan_s(m, x, v)?;
    let zero = x[0].cst(0.0);

    // δg_jk/δxⁱ = ∂g_jk/∂xⁱ − Nᵐᵢ · 2 C_mjk
    let mut delta_g = vec![zero.clone(); n * n * n]; // [i][j][k]
    for i in 0..n {
        let dgx = dg_dx_s(m, x, v, i)?;
        for j in 0..n {
            for k in 0..n {
                let mut acc = dgx[j * n + k].clone();
                for mm in 0..n {
                    acc = acc
                        - n_mat[mm * n + i].clone()
                            * cartan[(mm * n + j) * n + k].scale(2.0);
                }
                delta_g[(i * n + j) * n + k] = acc;
            }
        }
    }

    let dg = |i: usize, j: usize, k: usize| delta_g[(i * n + j) * n + k].clone();
    let mut gamma = vec![zero; n * n * n];
    for i in 0..n {
        for j in i..n {
            // symmetric in (i, j): assemble once
            let mut lowered = Vec::with_capacity(n);
            for s in 0..n {
                let term = dg(i, s, j) + dg(j, s, i) - dg(s, i, j);
                lowered.push(term);
            }
            for k in 0..n {
                let mut acc = x[0].cst(0.0);
                for (s, low) in lowered.iter().enumerate() {
                    acc = acc + g_inv[k * n + s].clone() * low.clone();
                }
                let value = acc.scale(0.5);
                gamma[(k * n + i) * n + j] = value.clone();
                gamma[(k * n + j) * n + i] = value;
            }
        }
    }
    Ok(gamma)
}

/// Christoffel symbols at `(x, v)`.
pub fn christoffel(m: &MetricDefinition, x: &[f64], v: &[f64]) -> Result<ChristoffelField> {
    m.check_admissible(x, v, None)?;
    let gamma = christoffel_s::<f64>(m, x, v)?;
    Ok(ChristoffelField {
        x: x.to_vec(),
        v: v.to_vec(),
        dim: m.dim(),
        gamma,
    })
}

/// Covariant derivative of `field` along `curve` with reference field
/// `w_ref` at instant `t`:
///
/// ```text
/// (D X)ᵏ = Ẋᵏ + Xⁱ γ̇ʲ Γᵏᵢⱼ(γ, W)
/// ```
///
/// Replacing the reference by a positive multiple leaves the result
/// unchanged (degree-0 homogeneity of Γ in the reference).
pub fn covariant_derivative(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    field: &VectorFieldAlongCurve,
    w_ref: &VectorFieldAlongCurve,
    t: f64,
    side: Option<Side>,
) -> Result<Vec<f64>> {
    if !field.shares_breaks_with(curve) || !w_ref.shares_breaks_with(curve) {
        return Err(Error::BreakMismatch);
    }
    let n = m.dim();
    let x = curve.position(t, side)?;
    let gdot = curve.velocity(t, side)?;
    let w = w_ref.value(t, side)?;
    m.check_admissible(&x, &w, Some(t))?;
    let xv = field.value(t, side)?;
    let xdot = field.derivative(t, 1, side)?;
    let gamma = christoffel_s::<f64>(m, &x, &w)?;
    let mut out = xdot;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[k] += xv[i] * gdot[j] * gamma[(k * n + i) * n + j];
            }
        }
    }
    Ok(out)
}

/// Residual of the almost-g-compatibility identity at `t`:
///
/// ```text
/// | d/dt g_W(X,Y) − g_W(DX,Y) − g_W(X,DY) − 2 C_W(DW,X,Y) |
/// ```
///
/// The time derivative on the left is taken by jets along the curve, so for
/// exact field representations the residual is pure roundoff.
pub fn check_almost_g_compat(
    m: &MetricDefinition,
    curve: &PiecewiseCurve,
    x_field: &VectorFieldAlongCurve,
    y_field: &VectorFieldAlongCurve,
    w_ref: &VectorFieldAlongCurve,
    t: f64,
    side: Option<Side>,
) -> Result<f64> {
    let n = m.dim();
    let x = curve.position(t, side)?;
    let w = w_ref.value(t, side)?;
    m.check_admissible(&x, &w, Some(t))?;

    // left side by jets in t
    let xj = curve.position_jets(m, t, 1, side)?;
    let wj = w_ref.jets(t, 1, side)?;
    let xfj = x_field.jets(t, 1, side)?;
    let yfj = y_field.jets(t, 1, side)?;
    let gj = fundamental_s::<Jet>(m, &xj, &wj)?;
    let mut gxy = xj[0].cst(0.0);
    for i in 0..n {
        for j in 0..n {
            gxy = gxy + gj[i * n + j].clone() * xfj[i].clone() * yfj[j].clone();
        }
    }
    let lhs = gxy.coeff(&[1]);

    // right side from values
    let g = m.fundamental_tensor(&x, &w)?;
    let c = m.cartan_tensor(&x, &w)?;
    let dx = covariant_derivative(m, curve, x_field, w_ref, t, side)?;
    let dy = covariant_derivative(m, curve, y_field, w_ref, t, side)?;
    let dw = covariant_derivative(m, curve, w_ref, w_ref, t, side)?;
    let xv = x_field.value(t, side)?;
    let yv = y_field.value(t, side)?;
    let rhs = g.inner(&dx, &yv) + g.inner(&xv, &dy) + 2.0 * c.contract(&dw, &xv, &yv);
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use serde_json::Value;

    #[test]
    fn euclidean_spray_and_christoffel_vanish() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let s = spray(&m, &[0.3, -0.7], &[1.0, 2.0]).unwrap();
        assert!(s.coefficients.iter().all(|&g| g.abs() < 1e-14));
        assert!(s.nonlinear.iter().all(|&g| g.abs() < 1e-14));
        let c = christoffel(&m, &[0.3, -0.7], &[1.0, 2.0]).unwrap();
        assert!(c.components().iter().all(|&g| g.abs() < 1e-13));
    }

    #[test]
    fn quartic_spray_vanishes() {
        let m = catalog::build("quartic", &Value::Null).unwrap();
        let s = spray(&m, &[0.0, 0.0], &[1.0, 0.7]).unwrap();
        assert!(s.coefficients.iter().all(|&g| g.abs() < 1e-12));
        let c = christoffel(&m, &[0.0, 0.0], &[1.0, 0.7]).unwrap();
        assert!(c.components().iter().all(|&g| g.abs() < 1e-11));
    }

    #[test]
    fn sphere_spray_closed_form() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let th = std::f64::consts::FRAC_PI_4;
        let s = spray(&m, &[th, 0.0], &[0.0, 1.0]).unwrap();
        // G^θ = −½ sinθ cosθ v_φ² = −¼ at θ = π/4, v = (0, 1)
        assert!((s.coefficients[0] + 0.25).abs() < 1e-12);
        assert!(s.coefficients[1].abs() < 1e-12);
    }

    #[test]
    fn sphere_christoffel_closed_form() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let th = std::f64::consts::FRAC_PI_4;
        let c = christoffel(&m, &[th, 0.0], &[0.4, 1.1]).unwrap();
        // Levi-Civita: Γ^θ_φφ = −sinθcosθ = −½, Γ^φ_θφ = cotθ = 1
        assert!((c.get(0, 1, 1) + 0.5).abs() < 1e-11);
        assert!((c.get(1, 0, 1) - 1.0).abs() < 1e-11);
        assert!((c.get(1, 1, 0) - 1.0).abs() < 1e-11);
        assert!(c.get(0, 0, 0).abs() < 1e-11);
    }

    #[test]
    fn spray_consistency_with_christoffel() {
        // Γᵏᵢⱼ(v) vⁱ vʲ = 2 Gᵏ(v)
        let m = catalog::build("funk", &Value::Null).unwrap();
        let x = [0.2, -0.1];
        let v = [0.8, 0.5];
        let s = spray(&m, &x, &v).unwrap();
        let c = christoffel(&m, &x, &v).unwrap();
        for k in 0..2 {
            let mut acc = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    acc += c.get(k, i, j) * v[i] * v[j];
                }
            }
            assert!(
                (acc - 2.0 * s.coefficients[k]).abs() < 1e-10,
                "k = {k}: {acc} vs {}",
                2.0 * s.coefficients[k]
            );
        }
    }

    #[test]
    fn christoffel_reference_homogeneity() {
        let m = catalog::build("randers", &Value::Null).unwrap();
        let x = [0.1, 0.4];
        let v = [0.9, -0.3];
        let v2: Vec<f64> = v.iter().map(|c| 2.0 * c).collect();
        let c1 = christoffel(&m, &x, &v).unwrap();
        let c2 = christoffel(&m, &x, &v2).unwrap();
        let worst = c1
            .components()
            .iter()
            .zip(c2.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "worst = {worst}");
    }

    #[test]
    fn covariant_derivative_in_flat_space_is_plain_derivative() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let curve = PiecewiseCurve::from_closure([0.0, 2.0], |t| vec![t, 0.5 * t]).unwrap();
        let field = VectorFieldAlongCurve::from_closure(&curve, |t| vec![t * t, 1.0]).unwrap();
        let gdot = VectorFieldAlongCurve::from_closure(&curve, |_| vec![1.0, 0.5]).unwrap();
        let d = covariant_derivative(&m, &curve, &field, &gdot, 1.0, None).unwrap();
        assert!((d[0] - 2.0).abs() < 1e-8);
        assert!(d[1].abs() < 1e-8);
    }
}
