//! Jacobi fields, parallel frames, conjugate and focal points.
//!
//! Fields are integrated in a parallel `g_γ̇`-orthonormal frame along the
//! geodesic, which turns `J″ = Rᵞ(γ̇, J)γ̇` into a first-order linear system
//! with the frame matrix of the spray-route operator. Frame, geodesic, and
//! all requested fields are co-integrated in a single pass. Conjugate and
//! focal instants are zeros of the determinant of the field matrix, located
//! by sign change plus bisection, with an SVD rank check as the
//! even-multiplicity guard.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::connection::christoffel_s;
use crate::curvature::jacobi_operator_spray;
use crate::curve::VectorFieldAlongCurve;
use crate::error::{Error, Result};
use crate::geodesic::{integrate_geodesic, GeodesicRecord};
use crate::jets::{Jet, Scalar};
use crate::metric::{fundamental_s, MetricDefinition};
use crate::ode::{integrate, DenseOutput, OdeOptions};
use crate::submanifold::{self, SubmanifoldPatch};

/// A parallel frame along a geodesic with its signature signs
/// (`g_γ̇(E_i, E_j) = ε_i δ_ij`).
pub struct FrameField {
    pub fields: Vec<VectorFieldAlongCurve>,
    pub signs: Vec<f64>,
}

/// A Jacobi field along a geodesic: `J` and its covariant derivative `J′`
/// (reference `γ̇`), dense in `t`.
pub struct JacobiField {
    geodesic_id: u64,
    span: [f64; 2],
    j: VectorFieldAlongCurve,
    dj: VectorFieldAlongCurve,
}

impl JacobiField {
    pub fn span(&self) -> [f64; 2] {
        self.span
    }

    pub fn geodesic_id(&self) -> u64 {
        self.geodesic_id
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        self.j.value(t, None).expect("inside span")
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        self.dj.value(t, None).expect("inside span")
    }

    pub fn field(&self) -> &VectorFieldAlongCurve {
        &self.j
    }

    pub fn derivative_field(&self) -> &VectorFieldAlongCurve {
        &self.dj
    }
}

/// `g_v`-orthonormal basis at a point by hyperbolic Gram–Schmidt; returns
/// the basis and the signs ε_i.
pub fn orthonormal_basis(
    m: &MetricDefinition,
    x: &[f64],
    v: &[f64],
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = m.dim();
    let g = m.fundamental_tensor(x, v)?;
    let mut candidates: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    // seed with the velocity direction so frames adapt to the geodesic when
    // it is nonnull
    if g.inner(v, v).abs() > 1e-10 {
        candidates.insert(0, v.to_vec());
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for c in &candidates {
            let mut w = c.clone();
            for (e, &sign) in basis.iter().zip(&signs) {
                let coeff = sign * g.inner(&w, e);
                for i in 0..n {
                    w[i] -= coeff * e[i];
                }
            }
            let q = g.inner(&w, &w);
            if best.as_ref().map_or(true, |(_, bq)| q.abs() > bq.abs()) {
                best = Some((w, q));
            }
        }
        let (w, q) = best.unwrap();
        if q.abs() < 1e-12 {
            return Err(Error::DegenerateTensor {
                det: q.abs(),
                threshold: 1e-12,
            });
        }
        let norm = q.abs().sqrt();
        basis.push(w.iter().map(|c| c / norm).collect());
        signs.push(q.signum());
    }
    Ok((basis, signs))
}

/// Result of co-integrating geodesic, frame, and a set of Jacobi fields.
struct JacobiSweep {
    dense: Arc<DenseOutput>,
    n: usize,
    nf: usize,
    signs: Vec<f64>,
    geodesic_id: u64,
    span: [f64; 2],
}

impl JacobiSweep {
    fn frame_at(&self, t: f64) -> Vec<Vec<f64>> {
        let s = self.dense.eval(t);
        let n = self.n;
        (0..n).map(|a| s[2 * n + a * n..2 * n + (a + 1) * n].to_vec()).collect()
    }

    /// Frame coordinates of field `f`: (y, z).
    fn coords_at(&self, t: f64, f: usize) -> (Vec<f64>, Vec<f64>) {
        let s = self.dense.eval(t);
        let n = self.n;
        let base = 2 * n + n * n + f * 2 * n;
        (
            s[base..base + n].to_vec(),
            s[base + n..base + 2 * n].to_vec(),
        )
    }

    /// Chart components of field `f` and its covariant derivative.
    fn chart_at(&self, t: f64, f: usize) -> (Vec<f64>, Vec<f64>) {
        let frame = self.frame_at(t);
        let (y, z) = self.coords_at(t, f);
        let n = self.n;
        let mut j = vec![0.0; n];
        let mut dj = vec![0.0; n];
        for a in 0..n {
            for i in 0..n {
                j[i] += y[a] * frame[a][i];
                dj[i] += z[a] * frame[a][i];
            }
        }
        (j, dj)
    }

    /// Matrix whose columns are the frame coordinates of the fields.
    fn field_matrix(&self, t: f64) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, self.nf, |a, f| self.coords_at(t, f).0[a])
    }

    fn det(&self, t: f64) -> f64 {
        self.field_matrix(t).determinant()
    }

    fn to_fields(&self) -> Result<Vec<JacobiField>> {
        let samples = 1024usize;
        let [a, b] = self.span;
        let ts: Vec<f64> = (0..=samples)
            .map(|k| a + (b - a) * k as f64 / samples as f64)
            .collect();
        let mut out = Vec::with_capacity(self.nf);
        for f in 0..self.nf {
            let mut js = Vec::with_capacity(ts.len());
            let mut djs = Vec::with_capacity(ts.len());
            for &t in &ts {
                let (j, dj) = self.chart_at(t, f);
                js.push(j);
                djs.push(dj);
            }
            out.push(JacobiField {
                geodesic_id: self.geodesic_id,
                span: self.span,
                j: VectorFieldAlongCurve::from_segment_samples(&[(ts.clone(), js)])?,
                dj: VectorFieldAlongCurve::from_segment_samples(&[(ts.clone(), djs)])?,
            });
        }
        Ok(out)
    }
}

/// Co-integrates the geodesic, a parallel orthonormal frame, and Jacobi
/// fields with the given chart-coordinate initial data `(J(a), J′(a))`.
fn jacobi_sweep(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    inits: &[(Vec<f64>, Vec<f64>)],
    opts: &OdeOptions,
) -> Result<JacobiSweep> {
    let n = m.dim();
    let nf = inits.len();
    let [a, b] = geo.span;
    let (x0, v0) = geo.state(a);
    let (basis, signs) = orthonormal_basis(m, &x0, &v0)?;
    let g0 = m.fundamental_tensor(&x0, &v0)?;
    let coords = |w: &[f64]| -> Vec<f64> {
        (0..n).map(|k| signs[k] * g0.inner(w, &basis[k])).collect()
    };

    let mut y0 = Vec::with_capacity(2 * n + n * n + 2 * n * nf);
    y0.extend_from_slice(&x0);
    y0.extend_from_slice(&v0);
    for e in &basis {
        y0.extend_from_slice(e);
    }
    for (j, dj) in inits {
        y0.extend(coords(j));
        y0.extend(coords(dj));
    }

    let signs_rhs = signs.clone();
    let rhs = move |_t: f64, state: &[f64]| -> Result<Vec<f64>> {
        let x = &state[..n];
        let v = &state[n..2 * n];
        let spray = crate::connection::spray_s::<f64>(m, x, v)?;
        let gamma = christoffel_s::<f64>(m, x, v)?;
        let op = jacobi_operator_spray(m, x, v)?;
        let gm = fundamental_s::<f64>(m, x, v)?;
        let frame: Vec<&[f64]> = (0..n)
            .map(|k| &state[2 * n + k * n..2 * n + (k + 1) * n])
            .collect();
        // frame matrix of w ↦ Rᵞ(γ̇, w)γ̇:  M_ab = ε_a g(R E_b, E_a)
        let mut mmat = vec![0.0; n * n];
        for b_idx in 0..n {
            let reb = op.apply(frame[b_idx]);
            for a_idx in 0..n {
                let mut inner = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        inner += gm[i * n + j] * reb[i] * frame[a_idx][j];
                    }
                }
                mmat[a_idx * n + b_idx] = signs_rhs[a_idx] * inner;
            }
        }
        let mut dy = vec![0.0; state.len()];
        dy[..n].copy_from_slice(v);
        for i in 0..n {
            dy[n + i] = -2.0 * spray[i];
        }
        for k in 0..n {
            for comp in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc -= frame[k][i] * v[j] * gamma[(comp * n + i) * n + j];
                    }
                }
                dy[2 * n + k * n + comp] = acc;
            }
        }
        for f in 0..nf {
            let base = 2 * n + n * n + f * 2 * n;
            let (yc, zc) = state[base..base + 2 * n].split_at(n);
            for k in 0..n {
                dy[base + k] = zc[k];
                let mut acc = 0.0;
                for b_idx in 0..n {
                    acc += mmat[k * n + b_idx] * yc[b_idx];
                }
                dy[base + n + k] = acc;
            }
        }
        Ok(dy)
    };

    let run = integrate(&rhs, a, &y0, b, opts, None)?;
    Ok(JacobiSweep {
        dense: Arc::new(run.dense),
        n,
        nf,
        signs,
        geodesic_id: geo.id(),
        span: [a, b],
    })
}

/// Parallel orthonormal frame along the geodesic.
pub fn parallel_frame(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    opts: &OdeOptions,
) -> Result<FrameField> {
    let sweep = jacobi_sweep(m, geo, &[], opts)?;
    let [a, b] = sweep.span;
    let samples = 1024usize;
    let ts: Vec<f64> = (0..=samples)
        .map(|k| a + (b - a) * k as f64 / samples as f64)
        .collect();
    let mut fields = Vec::with_capacity(sweep.n);
    for k in 0..sweep.n {
        let ys: Vec<Vec<f64>> = ts.iter().map(|&t| sweep.frame_at(t)[k].clone()).collect();
        fields.push(VectorFieldAlongCurve::from_segment_samples(&[(
            ts.clone(),
            ys,
        )])?);
    }
    Ok(FrameField {
        fields,
        signs: sweep.signs.clone(),
    })
}

/// The unique Jacobi field with `J(a) = j0`, `J′(a) = dj0`; linear in the
/// initial data.
pub fn solve_jacobi(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    j0: &[f64],
    dj0: &[f64],
    opts: &OdeOptions,
) -> Result<JacobiField> {
    let sweep = jacobi_sweep(m, geo, &[(j0.to_vec(), dj0.to_vec())], opts)?;
    Ok(sweep.to_fields()?.pop().unwrap())
}

/// Initial data for the P-Jacobi solution space: `r` fields carrying the
/// tangent basis with `tan J′ = S̃^P(J)`, `nor J′ = 0`, plus `n − r` fields
/// with `J(a) = 0` and `J′(a)` spanning the `g_γ̇`-normal complement.
fn p_jacobi_inits(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    p: &SubmanifoldPatch,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let n = m.dim();
    let [a, _] = geo.span;
    let (x0, v0) = geo.state(a);
    let (u, dist) = p.locate(&x0);
    if dist > 1e-9 {
        return Err(Error::EndpointNotOnSubmanifold { dist });
    }
    let (normal, res) = submanifold::is_normal(m, p, &u, &v0)?;
    if !normal && res > 1e-7 {
        return Err(Error::NotOrthogonal { residual: res });
    }
    let mut inits: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(n);
    let basis = p.tangent_basis(&u)?;
    for t_vec in &basis {
        let st = submanifold::normal_second_fundamental_form(m, p, &u, &v0, t_vec)?;
        inits.push((t_vec.clone(), st));
    }
    // g_γ̇-normal complement of the tangent space, spanned by the normal
    // parts of the coordinate vectors
    let mut complement: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let (_, nor) = submanifold::split_tan_nor(m, p, &u, &v0, &e)?;
        // keep only directions independent of what we already have (Euclidean)
        let mut w = nor;
        for q in &complement {
            let qn: f64 = q.iter().map(|c| c * c).sum();
            let dot: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
            for k in 0..n {
                w[k] -= dot / qn * q[k];
            }
        }
        let norm: f64 = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-9 {
            complement.push(w);
        }
    }
    if basis.len() + complement.len() != n {
        return Err(Error::DegenerateRestriction { det: 0.0 });
    }
    for w in complement {
        inits.push((vec![0.0; n], w));
    }
    Ok(inits)
}

/// Basis of the P-Jacobi solution space (n fields).
pub fn p_jacobi_basis(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    p: &SubmanifoldPatch,
    opts: &OdeOptions,
) -> Result<Vec<JacobiField>> {
    let inits = p_jacobi_inits(m, geo, p)?;
    jacobi_sweep(m, geo, &inits, opts)?.to_fields()
}

/// Zeros of `det[J₁ … J_n](t)` with multiplicities (SVD rank deficiency at
/// the located instant).
fn determinant_zeros(sweep: &JacobiSweep) -> Vec<(f64, usize)> {
    let [a, b] = sweep.span;
    let mut ts: Vec<f64> = Vec::new();
    let steps = sweep.dense.step_times();
    for w in steps.windows(2) {
        for k in 0..4 {
            ts.push(w[0] + (w[1] - w[0]) * k as f64 / 4.0);
        }
    }
    ts.push(b);
    // the field matrix is structurally singular at the start for families
    // vanishing there; skip an initial sliver
    let skip = a + (b - a) * 1e-4;
    let ts: Vec<f64> = ts.into_iter().filter(|&t| t > skip).collect();
    let d: Vec<f64> = ts.iter().map(|&t| sweep.det(t)).collect();
    let scale = d.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1e-300);

    let mut zeros: Vec<(f64, usize)> = Vec::new();
    let push_zero = |t: f64, zeros: &mut Vec<(f64, usize)>| {
        if zeros.iter().any(|&(z, _)| (z - t).abs() < 1e-6 * (b - a)) {
            return;
        }
        let mat = sweep.field_matrix(t);
        let svd = mat.svd(false, false);
        let smax = svd.singular_values.max().max(1e-300);
        let mult = svd
            .singular_values
            .iter()
            .filter(|&&s| s < 1e-6 * smax)
            .count();
        if mult > 0 {
            zeros.push((t, mult));
        }
    };

    for i in 1..ts.len() {
        if d[i - 1] == 0.0 {
            continue;
        }
        if d[i - 1].signum() != d[i].signum() && d[i] != 0.0 {
            // bisect the sign change
            let (mut lo, mut hi) = (ts[i - 1], ts[i]);
            let mut flo = d[i - 1];
            for _ in 0..60 {
                if hi - lo <= 1e-9 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let fm = sweep.det(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            push_zero(0.5 * (lo + hi), &mut zeros);
        }
    }
    // even-multiplicity guard: deep local minima of |det| without a sign change
    for i in 1..ts.len() - 1 {
        if d[i].abs() < d[i - 1].abs() && d[i].abs() < d[i + 1].abs() && d[i].abs() < 1e-10 * scale
        {
            // golden-section refine the minimum of |det|
            let (mut lo, mut hi) = (ts[i - 1], ts[i + 1]);
            for _ in 0..80 {
                let m1 = lo + (hi - lo) * 0.382;
                let m2 = lo + (hi - lo) * 0.618;
                if sweep.det(m1).abs() < sweep.det(m2).abs() {
                    hi = m2;
                } else {
                    lo = m1;
                }
                if hi - lo < 1e-9 {
                    break;
                }
            }
            push_zero(0.5 * (lo + hi), &mut zeros);
        }
    }
    zeros.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    zeros
}

/// Conjugate instants of `γ(a)` along the geodesic: zeros of the determinant
/// over the fields with `J(a) = 0`, `J′(a) = Eᵢ`.
pub fn conjugate_points(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    opts: &OdeOptions,
) -> Result<Vec<(f64, usize)>> {
    let n = m.dim();
    let [a, _] = geo.span;
    let (x0, v0) = geo.state(a);
    let (basis, _) = orthonormal_basis(m, &x0, &v0)?;
    let inits: Vec<(Vec<f64>, Vec<f64>)> = basis
        .iter()
        .map(|e| (vec![0.0; n], e.clone()))
        .collect();
    let sweep = jacobi_sweep(m, geo, &inits, opts)?;
    Ok(determinant_zeros(&sweep))
}

/// P-focal instants along a geodesic leaving `P` orthogonally: zeros of the
/// determinant over the P-Jacobi basis.
pub fn focal_points(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    p: &SubmanifoldPatch,
    opts: &OdeOptions,
) -> Result<Vec<(f64, usize)>> {
    let inits = p_jacobi_inits(m, geo, p)?;
    let sweep = jacobi_sweep(m, geo, &inits, opts)?;
    Ok(determinant_zeros(&sweep))
}

/// Values of `g_γ̇(J₁, J₂′) − g_γ̇(J₁′, J₂)` along the geodesic and the
/// maximum drift from the initial value.
pub struct WronskianReport {
    pub values: Vec<(f64, f64)>,
    pub drift: f64,
}

/// The Wronskian pairing of two Jacobi fields; constant along geodesics.
pub fn wronskian(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    j1: &JacobiField,
    j2: &JacobiField,
) -> Result<WronskianReport> {
    if j1.geodesic_id() != geo.id() || j2.geodesic_id() != geo.id() {
        return Err(Error::MismatchedGeodesic);
    }
    let [a, b] = geo.span;
    let samples = 200usize;
    let mut values = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = a + (b - a) * k as f64 / samples as f64;
        let (x, v) = geo.state(t);
        let g = m.fundamental_tensor(&x, &v)?;
        let w = g.inner(&j1.value(t), &j2.derivative(t)) - g.inner(&j1.derivative(t), &j2.value(t));
        values.push((t, w));
    }
    let w0 = values[0].1;
    let drift = values
        .iter()
        .map(|&(_, w)| (w - w0).abs())
        .fold(0.0, f64::max);
    Ok(WronskianReport { values, drift })
}

/// `d exp_p(v)[w] = J(1)` for the Jacobi field with `J(0) = 0`, `J′(0) = w`.
pub fn dexp(
    m: &MetricDefinition,
    p: &[f64],
    v: &[f64],
    w: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<f64>> {
    let geo = match integrate_geodesic(m, p, v, [0.0, 1.0], opts) {
        Ok(g) => g,
        Err(Error::DomainExit { t_exit }) => return Err(Error::ExpDomain { t_exit }),
        Err(e) => return Err(e),
    };
    let j = solve_jacobi(m, &geo, &vec![0.0; m.dim()], w, opts)?;
    Ok(j.value(1.0))
}

/// Structural diagnostics of a Jacobi field along a nonnull geodesic.
#[derive(Clone, Debug)]
pub struct OrthogonalityReport {
    /// Max deviation of `g_γ̇(γ̇, J)` from the straight line through its
    /// endpoint values.
    pub affine_deviation: f64,
    /// Endpoint values of `g_γ̇(γ̇, J)`.
    pub pairing_endpoints: [f64; 2],
    /// Jacobi-equation residual of the tangential part.
    pub tan_jacobi_residual: f64,
    /// Jacobi-equation residual of the normal part.
    pub nor_jacobi_residual: f64,
    /// `max |(tan J)′ − tan(J′)|`.
    pub commutation_residual: f64,
}

/// Checks the tangential/normal structure of a Jacobi field: affineness of
/// the pairing with `γ̇`, the Jacobi equation for both split parts, and the
/// commutation of splitting with the covariant derivative.
pub fn orthogonality_report(
    m: &MetricDefinition,
    geo: &GeodesicRecord,
    j: &JacobiField,
) -> Result<OrthogonalityReport> {
    if j.geodesic_id() != geo.id() {
        return Err(Error::MismatchedGeodesic);
    }
    let n = m.dim();
    let [a, b] = geo.span;
    let (x0, v0) = geo.state(a);
    let l0 = m.evaluate_unchecked(&x0, &v0);
    let scale0 = v0.iter().map(|c| c * c).sum::<f64>();
    if l0.abs() < 1e-10 * scale0.max(1e-300) {
        return Err(Error::NullGeodesic { l: l0 });
    }
    let curve = geo.to_curve();

    let pairing = |t: f64| -> Result<f64> {
        let (x, v) = geo.state(t);
        let g = m.fundamental_tensor(&x, &v)?;
        Ok(g.inner(&v, &j.value(t)))
    };
    let fa = pairing(a)?;
    let fb = pairing(b)?;
    let mut affine_deviation: f64 = 0.0;
    let grid = 65usize;
    for k in 0..=grid {
        let t = a + (b - a) * k as f64 / grid as f64;
        let line = fa + (fb - fa) * (t - a) / (b - a);
        affine_deviation = affine_deviation.max((pairing(t)? - line).abs());
    }

    let mut tan_res: f64 = 0.0;
    let mut nor_res: f64 = 0.0;
    let mut comm_res: f64 = 0.0;
    let inner_grid = 33usize;
    for k in 1..inner_grid {
        let t = a + (b - a) * k as f64 / inner_grid as f64;
        // φ(t) = g_γ̇(γ̇, J)/L as a jet in t (order 2)
        let xj = curve.position_jets(m, t, 2, None)?;
        let vj = curve.velocity_jets(m, t, 2, None)?;
        let jj = j.field().jets(t, 2, None)?;
        let gj = fundamental_s::<Jet>(m, &xj, &vj)?;
        let mut num = xj[0].cst(0.0);
        for i in 0..n {
            for jdx in 0..n {
                num = num + gj[i * n + jdx].clone() * vj[i].clone() * jj[jdx].clone();
            }
        }
        let phi = num.scale(1.0 / l0);
        let (x, v) = geo.state(t);
        let vnorm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        // tangential part satisfies the Jacobi equation iff φ is affine
        let phi2 = 2.0 * phi.coeff(&[2]);
        tan_res = tan_res.max(phi2.abs() * vnorm);

        // normal part: residual of D(J′) − φ″γ̇ − Rᵞ(γ̇, J − φγ̇)γ̇
        let gamma = christoffel_s::<f64>(m, &x, &v)?;
        let djv = j.derivative(t);
        let djdot = j.derivative_field().derivative(t, 1, None)?;
        let mut ddj = djdot;
        for kk in 0..n {
            for i in 0..n {
                for jdx in 0..n {
                    ddj[kk] += djv[i] * v[jdx] * gamma[(kk * n + i) * n + jdx];
                }
            }
        }
        let op = jacobi_operator_spray(m, &x, &v)?;
        let jv = j.value(t);
        let nor_part: Vec<f64> = jv
            .iter()
            .zip(&v)
            .map(|(ji, vi)| ji - phi.value() * vi)
            .collect();
        let r_nor = op.apply(&nor_part);
        for i in 0..n {
            nor_res = nor_res.max((ddj[i] - phi2 * v[i] - r_nor[i]).abs());
        }

        // (tan J)′ = φ′γ̇ along a geodesic; tan(J′) = (g(γ̇,J′)/L)γ̇
        let g = m.fundamental_tensor(&x, &v)?;
        let phi1 = phi.coeff(&[1]);
        let psi = g.inner(&v, &djv) / l0;
        comm_res = comm_res.max((phi1 - psi).abs() * vnorm);
    }

    Ok(OrthogonalityReport {
        affine_deviation,
        pairing_endpoints: [fa, fb],
        tan_jacobi_residual: tan_res,
        nor_jacobi_residual: nor_res,
        commutation_residual: comm_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use serde_json::Value;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn opts() -> OdeOptions {
        OdeOptions::default()
    }

    #[test]
    fn flat_jacobi_fields_are_affine() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let geo =
            integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], [0.0, 2.0], &opts()).unwrap();
        let j = solve_jacobi(&m, &geo, &[0.5, -0.25], &[0.0, 1.0], &opts()).unwrap();
        let at = j.value(2.0);
        assert!((at[0] - 0.5).abs() < 1e-9);
        assert!((at[1] - (-0.25 + 2.0)).abs() < 1e-9);
    }

    #[test]
    fn sphere_normal_jacobi_field_is_sine() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        // unit-speed equator geodesic
        let geo = integrate_geodesic(
            &m,
            &[FRAC_PI_2, 0.0],
            &[0.0, 1.0],
            [0.0, 2.0],
            &opts(),
        )
        .unwrap();
        // J(0) = 0, J'(0) = unit normal ∂θ
        let j = solve_jacobi(&m, &geo, &[0.0, 0.0], &[1.0, 0.0], &opts()).unwrap();
        let at = j.value(FRAC_PI_2);
        assert!((at[0] - 1.0).abs() < 1e-8, "|J(π/2)| = {at:?}");
        let at = j.value(2.0);
        assert!((at[0] - 2.0f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn tangential_jacobi_fields_stay_tangential() {
        let m = catalog::build("funk", &Value::Null).unwrap();
        let geo =
            integrate_geodesic(&m, &[0.1, -0.2], &[0.5, 0.3], [0.0, 1.0], &opts()).unwrap();
        let (_, v0) = geo.state(0.0);
        // J(0) = a₂ γ̇(0), J'(0) = a₁ γ̇(0)  →  J(t) = (a₁ t + a₂) γ̇(t)
        let (a1, a2) = (0.7, -0.4);
        let j0: Vec<f64> = v0.iter().map(|c| a2 * c).collect();
        let dj0: Vec<f64> = v0.iter().map(|c| a1 * c).collect();
        let j = solve_jacobi(&m, &geo, &j0, &dj0, &opts()).unwrap();
        for &t in &[0.3, 0.6, 1.0] {
            let (_, v) = geo.state(t);
            let expect: Vec<f64> = v.iter().map(|c| (a1 * t + a2) * c).collect();
            let got = j.value(t);
            for i in 0..2 {
                assert!(
                    (got[i] - expect[i]).abs() < 1e-7,
                    "t = {t}: {got:?} vs {expect:?}"
                );
            }
        }
    }

    #[test]
    fn sphere_conjugate_point_at_pi() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let geo = integrate_geodesic(
            &m,
            &[FRAC_PI_2, 0.0],
            &[0.0, 1.0],
            [0.0, 3.5],
            &opts(),
        )
        .unwrap();
        let zeros = conjugate_points(&m, &geo, &opts()).unwrap();
        assert_eq!(zeros.len(), 1, "{zeros:?}");
        assert!((zeros[0].0 - PI).abs() < 1e-6, "t* = {}", zeros[0].0);
        assert_eq!(zeros[0].1, 1); // multiplicity n − 1
    }

    #[test]
    fn euclidean_and_hyperbolic_have_no_conjugate_points() {
        for id in ["euclidean", "hyperbolic"] {
            let m = catalog::build(id, &Value::Null).unwrap();
            let geo =
                integrate_geodesic(&m, &[0.05, 0.0], &[0.2, 0.1], [0.0, 2.0], &opts()).unwrap();
            let zeros = conjugate_points(&m, &geo, &opts()).unwrap();
            assert!(zeros.is_empty(), "{id}: {zeros:?}");
        }
    }

    #[test]
    fn circle_focal_point_at_center() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let p = submanifold::circle_patch([0.0, 0.0], 1.0);
        // inward radial geodesic from (1, 0)
        let geo =
            integrate_geodesic(&m, &[1.0, 0.0], &[-1.0, 0.0], [0.0, 1.8], &opts()).unwrap();
        let zeros = focal_points(&m, &geo, &p, &opts()).unwrap();
        assert_eq!(zeros.len(), 1, "{zeros:?}");
        assert!((zeros[0].0 - 1.0).abs() < 1e-6, "t* = {}", zeros[0].0);
    }

    #[test]
    fn wronskian_is_constant() {
        let m = catalog::build("sphere", &Value::Null).unwrap();
        let geo = integrate_geodesic(
            &m,
            &[FRAC_PI_2, 0.0],
            &[0.0, 1.0],
            [0.0, 2.0],
            &opts(),
        )
        .unwrap();
        let j1 = solve_jacobi(&m, &geo, &[0.0, 0.0], &[1.0, 0.0], &opts()).unwrap();
        let j2 = solve_jacobi(&m, &geo, &[1.0, 0.0], &[0.0, 0.0], &opts()).unwrap();
        let rep = wronskian(&m, &geo, &j1, &j2).unwrap();
        assert!((rep.values[0].1 + 1.0).abs() < 1e-9, "{}", rep.values[0].1);
        assert!(rep.drift < 1e-7, "drift = {}", rep.drift);
    }

    #[test]
    fn dexp_matches_flat_translation() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let d = dexp(&m, &[0.0, 0.0], &[1.0, 0.5], &[0.2, -0.3], &opts()).unwrap();
        assert!((d[0] - 0.2).abs() < 1e-9 && (d[1] + 0.3).abs() < 1e-9);
    }

    #[test]
    fn mismatched_geodesics_are_rejected() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let g1 =
            integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], [0.0, 1.0], &opts()).unwrap();
        let g2 =
            integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], [0.0, 1.0], &opts()).unwrap();
        let j1 = solve_jacobi(&m, &g1, &[0.0, 0.0], &[0.0, 1.0], &opts()).unwrap();
        let j2 = solve_jacobi(&m, &g2, &[0.0, 0.0], &[0.0, 1.0], &opts()).unwrap();
        assert!(matches!(
            wronskian(&m, &g1, &j1, &j2),
            Err(Error::MismatchedGeodesic)
        ));
    }

    #[test]
    fn null_geodesic_split_is_refused() {
        let m = catalog::build("pseudo_euclidean", &Value::Null).unwrap();
        let geo =
            integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 1.0], [0.0, 1.0], &opts()).unwrap();
        let j = solve_jacobi(&m, &geo, &[0.1, 0.0], &[0.0, 0.2], &opts()).unwrap();
        assert!(matches!(
            orthogonality_report(&m, &geo, &j),
            Err(Error::NullGeodesic { .. })
        ));
    }
}
