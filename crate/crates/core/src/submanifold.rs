//! Parametric submanifold patches: normality tests, tangent/normal
//! splitting, normal-section construction, and both second fundamental
//! forms.
//!
//! A patch is an immersion `u ∈ ℝʳ ↦ x ∈ ℝⁿ` evaluable on jets. The normal
//! set at a point is conic and generally position-dependent on genuinely
//! Finslerian metrics: normal directions are found by damped Newton on
//! `g_v(v, T_a) = 0` over unit vectors, seeded from the Euclidean normal.
//! Where several normal sheets exist the sheet connected to the seed is the
//! one reported.

use nalgebra::{DMatrix, DVector};

use crate::connection::christoffel_s;
use crate::error::{Error, Result};
use crate::jets::{lift_immersion, Immersion, Jet, Scalar};
use crate::metric::{dg_dx_s, MetricDefinition};

/// A parametric r-dimensional patch inside the chart.
pub struct SubmanifoldPatch {
    name: String,
    immersion: Box<dyn Immersion>,
    param_box: Vec<[f64; 2]>,
}

impl SubmanifoldPatch {
    pub fn new(
        name: impl Into<String>,
        immersion: Box<dyn Immersion>,
        param_box: Vec<[f64; 2]>,
    ) -> SubmanifoldPatch {
        assert_eq!(param_box.len(), immersion.dim_param());
        SubmanifoldPatch {
            name: name.into(),
            immersion,
            param_box,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_param(&self) -> usize {
        self.immersion.dim_param()
    }

    pub fn dim_ambient(&self) -> usize {
        self.immersion.dim_ambient()
    }

    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        self.immersion.eval_f64(u)
    }

    /// Tangent basis `∂x/∂uᵃ` at `u`; checks immersion rank through the
    /// singular values of the differential.
    pub fn tangent_basis(&self, u: &[f64]) -> Result<Vec<Vec<f64>>> {
        let r = self.dim_param();
        let n = self.dim_ambient();
        if r == 0 {
            return Ok(Vec::new());
        }
        let mut basis = Vec::with_capacity(r);
        for a in 0..r {
            let jets = lift_immersion(self.immersion.as_ref(), u, &[a], 1)?;
            basis.push(jets.iter().map(|j| j.coeff(&[1])).collect::<Vec<f64>>());
        }
        let mat = DMatrix::from_fn(n, r, |i, a| basis[a][i]);
        let svd = mat.svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin < 1e-9 * smax.max(1e-300) {
            return Err(Error::Invalid(format!(
                "patch '{}' is not an immersion at the given parameter (σ_min/σ_max = {:.3e})",
                self.name,
                smin / smax
            )));
        }
        Ok(basis)
    }

    /// Second parameter derivatives `∂²x/∂uᵃ∂uᵇ`, indexed `[a][b][component]`.
    pub fn second_derivatives(&self, u: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let r = self.dim_param();
        let mut out = vec![vec![Vec::new(); r]; r];
        for a in 0..r {
            for b in a..r {
                let comps: Vec<f64> = if a == b {
                    lift_immersion(self.immersion.as_ref(), u, &[a], 2)?
                        .iter()
                        .map(|j| j.partial(&[2]))
                        .collect()
                } else {
                    lift_immersion(self.immersion.as_ref(), u, &[a, b], 2)?
                        .iter()
                        .map(|j| j.partial(&[1, 1]))
                        .collect()
                };
                out[a][b] = comps.clone();
                out[b][a] = comps;
            }
        }
        Ok(out)
    }

    /// Nearest parameter to `x` by Gauss–Newton from a coarse grid; returns
    /// the parameter and the chart distance.
    pub fn locate(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let r = self.dim_param();
        if r == 0 {
            let p = self.point(&[]);
            return (Vec::new(), euclid_dist(&p, x));
        }
        let grid = 24usize;
        let mut best_u = vec![0.0; r];
        let mut best_d = f64::INFINITY;
        let mut probe = vec![0usize; r];
        loop {
            let u: Vec<f64> = probe
                .iter()
                .zip(&self.param_box)
                .map(|(&i, &[lo, hi])| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
                .collect();
            let d = euclid_dist(&self.point(&u), x);
            if d < best_d {
                best_d = d;
                best_u = u;
            }
            let mut k = 0;
            while k < r {
                probe[k] += 1;
                if probe[k] < grid {
                    break;
                }
                probe[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
        let mut u = best_u;
        for _ in 0..50 {
            let p = self.point(&u);
            let res: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
            let basis = match self.tangent_basis(&u) {
                Ok(b) => b,
                Err(_) => break,
            };
            let n = self.dim_ambient();
            let jac = DMatrix::from_fn(n, r, |i, a| basis[a][i]);
            let rhs = DVector::from_column_slice(&res);
            let svd = jac.svd(true, true);
            let step = match svd.solve(&rhs, 1e-13) {
                Ok(s) => s,
                Err(_) => break,
            };
            let norm = step.norm();
            for a in 0..r {
                u[a] += step[a];
            }
            if norm < 1e-13 {
                break;
            }
        }
        let d = euclid_dist(&self.point(&u), x);
        (u, d)
    }
}

fn euclid_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Tests whether `v` is `g_v`-orthogonal to the patch at `x(u)`; returns the
/// verdict and the worst scaled residual. The verdict is invariant under
/// `v ↦ λv` for `λ > 0`.
pub fn is_normal(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    v: &[f64],
) -> Result<(bool, f64)> {
    let x = patch.point(u);
    m.check_admissible(&x, v, None)?;
    let basis = patch.tangent_basis(u)?;
    if basis.is_empty() {
        return Ok((true, 0.0));
    }
    let g = m.fundamental_tensor(&x, v)?;
    let gnorm = matrix_inf_norm(g.matrix());
    let vnorm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut worst: f64 = 0.0;
    for t in &basis {
        let tnorm = t.iter().map(|c| c * c).sum::<f64>().sqrt();
        let scale = (gnorm * vnorm * tnorm).max(1e-300);
        worst = worst.max(g.inner(v, t).abs() / scale);
    }
    Ok((worst <= 1e-9, worst))
}

fn matrix_inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Splits `y` into tangent and `g_N`-normal parts at `x(u)`. Idempotent:
/// splitting either part again reproduces it.
pub fn split_tan_nor(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    n_ref: &[f64],
    y: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = patch.point(u);
    m.check_admissible(&x, n_ref, None)?;
    let basis = patch.tangent_basis(u)?;
    if basis.is_empty() {
        return Ok((vec![0.0; y.len()], y.to_vec()));
    }
    let coeffs = tangent_coefficients(m, &x, n_ref, &basis, y)?;
    let n = y.len();
    let mut tan = vec![0.0; n];
    for (c, t) in coeffs.iter().zip(&basis) {
        for i in 0..n {
            tan[i] += c * t[i];
        }
    }
    let nor: Vec<f64> = y.iter().zip(&tan).map(|(a, b)| a - b).collect();
    Ok((tan, nor))
}

/// Coefficients of the tangential projection of `y` in the given basis,
/// solving the Gram system of `g_N` restricted to the tangent space.
pub(crate) fn tangent_coefficients(
    m: &MetricDefinition,
    x: &[f64],
    n_ref: &[f64],
    basis: &[Vec<f64>],
    y: &[f64],
) -> Result<Vec<f64>> {
    let r = basis.len();
    let g = m.fundamental_tensor(x, n_ref)?;
    let gram = DMatrix::from_fn(r, r, |a, b| g.inner(&basis[a], &basis[b]));
    let det = gram.determinant();
    let scale = (0..r)
        .map(|a| (0..r).map(|b| gram[(a, b)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-300);
    if det.abs() < 1e-10 * scale.powi(r as i32) {
        return Err(Error::DegenerateRestriction { det: det.abs() });
    }
    let rhs = DVector::from_fn(r, |a, _| g.inner(y, &basis[a]));
    let sol = gram
        .lu()
        .solve(&rhs)
        .ok_or(Error::DegenerateRestriction { det: det.abs() })?;
    Ok(sol.iter().cloned().collect())
}

/// Finds a unit vector `g_v`-orthogonal to the patch at `x(u)` by damped
/// Newton from `seed` (or from the Euclidean normal when absent). The fiber
/// derivative of `v ↦ g_v(v, T_a)` is `g_v(·, T_a)` because the Cartan
/// contraction with the reference vanishes, so the Newton matrix is exact.
pub fn normal_section(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    seed: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let x = patch.point(u);
    let n = patch.dim_ambient();
    let basis = patch.tangent_basis(u)?;
    let r = basis.len();
    let mut v: Vec<f64> = match seed {
        Some(s) => normalize(s),
        None => {
            if r == 0 {
                return Err(Error::Invalid(
                    "a point patch needs an explicit normal seed".into(),
                ));
            }
            euclidean_complement(&basis, n).ok_or(Error::NoNormalSection)?
        }
    };
    if r == 0 {
        return if m.is_admissible(&x, &v) {
            Ok(v)
        } else {
            Err(Error::NoNormalSection)
        };
    }

    let residual = |v: &[f64]| -> Result<(Vec<f64>, f64)> {
        let g = m.fundamental_tensor(&x, v)?;
        let mut f: Vec<f64> = basis.iter().map(|t| g.inner(v, t)).collect();
        f.push(v.iter().map(|c| c * c).sum::<f64>() - 1.0);
        let norm = f.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok((f, norm))
    };

    let (mut f, mut fnorm) = residual(&v).map_err(|_| Error::NoNormalSection)?;
    for _ in 0..60 {
        if fnorm < 1e-13 {
            break;
        }
        let g = m
            .fundamental_tensor(&x, &v)
            .map_err(|_| Error::NoNormalSection)?;
        let mut jac = DMatrix::zeros(r + 1, n);
        for (a, t) in basis.iter().enumerate() {
            let row = g.lower(t);
            for i in 0..n {
                jac[(a, i)] = row[i];
            }
        }
        for i in 0..n {
            jac[(r, i)] = 2.0 * v[i];
        }
        let rhs = DVector::from_fn(r + 1, |k, _| -f[k]);
        let svd = jac.svd(true, true);
        let step = svd.solve(&rhs, 1e-13).map_err(|_| Error::NoNormalSection)?;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let trial: Vec<f64> = v
                .iter()
                .enumerate()
                .map(|(i, &c)| c + lambda * step[i])
                .collect();
            if let Ok((tf, tn)) = residual(&trial) {
                if tn < fnorm {
                    v = trial;
                    f = tf;
                    fnorm = tn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if fnorm >= 1e-10 || !m.is_admissible(&x, &v) {
        return Err(Error::NoNormalSection);
    }
    Ok(v)
}

/// Derivative of the unit normal section along the parameter direction
/// `u_dir`, by implicit differentiation of the defining equations
/// `g_N(N, T_a) = 0` and `⟨N, N⟩ = 1`.
pub fn normal_section_derivative(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    n_vec: &[f64],
    u_dir: &[f64],
) -> Result<Vec<f64>> {
    let x = patch.point(u);
    let n = patch.dim_ambient();
    let basis = patch.tangent_basis(u)?;
    let r = basis.len();
    if r == 0 {
        return Ok(vec![0.0; n]);
    }
    let second = patch.second_derivatives(u)?;
    let g = m.fundamental_tensor(&x, n_vec)?;
    let mut xdot = vec![0.0; n];
    for (b, t) in basis.iter().enumerate() {
        for i in 0..n {
            xdot[i] += u_dir[b] * t[i];
        }
    }
    let tdot: Vec<Vec<f64>> = (0..r)
        .map(|a| {
            let mut out = vec![0.0; n];
            for b in 0..r {
                for i in 0..n {
                    out[i] += u_dir[b] * second[a][b][i];
                }
            }
            out
        })
        .collect();
    // directional x-derivative of g at fixed reference
    let mut dg_dir = vec![0.0; n * n];
    for (mm, &xm) in xdot.iter().enumerate() {
        if xm == 0.0 {
            continue;
        }
        let dg = dg_dx_s::<f64>(m, &x, n_vec, mm)?;
        for (dst, src) in dg_dir.iter_mut().zip(dg.iter()) {
            *dst += xm * src;
        }
    }
    let quad = |a: &[f64], b: &[f64], mat: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += mat[i * n + j] * a[i] * b[j];
            }
        }
        s
    };
    // g_N(Ṅ, T_a) = −[ (∂_x g · ẋ)(N, T_a) + g_N(N, Ṫ_a) ], ⟨N, Ṅ⟩ = 0;
    // the Cartan term drops because C_N(·, N, ·) = 0
    let mut jac = DMatrix::zeros(r + 1, n);
    let mut rhs = DVector::zeros(r + 1);
    for (a, t) in basis.iter().enumerate() {
        let row = g.lower(t);
        for i in 0..n {
            jac[(a, i)] = row[i];
        }
        rhs[a] = -(quad(n_vec, t, &dg_dir) + g.inner(n_vec, &tdot[a]));
    }
    for i in 0..n {
        jac[(r, i)] = n_vec[i];
    }
    let svd = jac.svd(true, true);
    let sol = svd.solve(&rhs, 1e-13).map_err(|_| Error::NoNormalSection)?;
    Ok(sol.iter().cloned().collect())
}

fn check_normal_input(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    n_vec: &[f64],
) -> Result<()> {
    let (ok, residual) = is_normal(m, patch, u, n_vec)?;
    if !ok && residual > 1e-7 {
        return Err(Error::NotOrthogonal { residual });
    }
    Ok(())
}

/// Expresses an ambient tangent vector in the patch's parameter basis,
/// erroring when it is not tangent.
fn parameter_coefficients(patch: &SubmanifoldPatch, u: &[f64], vec: &[f64]) -> Result<Vec<f64>> {
    let basis = patch.tangent_basis(u)?;
    let r = basis.len();
    let n = patch.dim_ambient();
    if r == 0 {
        let norm = vec.iter().map(|c| c * c).sum::<f64>().sqrt();
        return if norm < 1e-9 {
            Ok(Vec::new())
        } else {
            Err(Error::NotTangent { residual: norm })
        };
    }
    let mat = DMatrix::from_fn(n, r, |i, a| basis[a][i]);
    let rhs = DVector::from_column_slice(vec);
    let svd = mat.clone().svd(true, true);
    let sol = svd.solve(&rhs, 1e-13).map_err(|_| Error::NotTangent {
        residual: f64::NAN,
    })?;
    let recon = &mat * &sol;
    let res = (&recon - &rhs).norm();
    let scale = rhs.norm().max(1e-12);
    if res > 1e-7 * scale.max(1.0) {
        return Err(Error::NotTangent { residual: res });
    }
    Ok(sol.iter().cloned().collect())
}

/// Second fundamental form `S_N(U, W) = nor_N ∇ᴺ_U W̃` for tangent vectors
/// `U, W` in ambient coordinates. `W̃` is extended with constant basis
/// coefficients along the parameter line through `u` in direction `U`;
/// bilinearity makes the result extension-independent.
pub fn second_fundamental_form(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    n_vec: &[f64],
    u_tan: &[f64],
    w_tan: &[f64],
) -> Result<Vec<f64>> {
    check_normal_input(m, patch, u, n_vec)?;
    let x = patch.point(u);
    let n = patch.dim_ambient();
    let cu = parameter_coefficients(patch, u, u_tan)?;
    let cw = parameter_coefficients(patch, u, w_tan)?;
    if cu.is_empty() {
        return Ok(vec![0.0; n]);
    }
    let second = patch.second_derivatives(u)?;
    let r = cu.len();
    let mut wdot = vec![0.0; n];
    for a in 0..r {
        for b in 0..r {
            for i in 0..n {
                wdot[i] += cw[a] * cu[b] * second[a][b][i];
            }
        }
    }
    let gamma = christoffel_s::<f64>(m, &x, n_vec)?;
    let mut dw = wdot;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                dw[k] += w_tan[i] * u_tan[j] * gamma[(k * n + i) * n + j];
            }
        }
    }
    let (_, nor) = split_tan_nor(m, patch, u, n_vec, &dw)?;
    Ok(nor)
}

/// Normal second fundamental form `S̃_N(U) = tan_N ∇ᴺ_U N`, computed from
/// the implicit derivative of the normal section through `N`.
pub fn normal_second_fundamental_form(
    m: &MetricDefinition,
    patch: &SubmanifoldPatch,
    u: &[f64],
    n_vec: &[f64],
    u_tan: &[f64],
) -> Result<Vec<f64>> {
    check_normal_input(m, patch, u, n_vec)?;
    let x = patch.point(u);
    let n = patch.dim_ambient();
    let cu = parameter_coefficients(patch, u, u_tan)?;
    if cu.is_empty() {
        return Ok(vec![0.0; n]);
    }
    // work with the unit section through n_vec, then rescale
    let scale = n_vec.iter().map(|c| c * c).sum::<f64>().sqrt();
    let unit: Vec<f64> = n_vec.iter().map(|c| c / scale).collect();
    let ndot_unit = normal_section_derivative(m, patch, u, &unit, &cu)?;
    let gamma = christoffel_s::<f64>(m, &x, n_vec)?;
    let mut dn: Vec<f64> = ndot_unit.iter().map(|c| c * scale).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                dn[k] += n_vec[i] * u_tan[j] * gamma[(k * n + i) * n + j];
            }
        }
    }
    let (tan, _) = split_tan_nor(m, patch, u, n_vec, &dn)?;
    Ok(tan)
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
    v.iter().map(|c| c / norm).collect()
}

/// Unit vector Euclidean-orthogonal to the given tangent basis: projects the
/// coordinate vectors onto the complement and keeps the largest remainder.
fn euclidean_complement(basis: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    // orthonormalize the basis (Euclidean) first
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for t in basis {
        let mut r = t.clone();
        for q in &ortho {
            let dot: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            for i in 0..n {
                r[i] -= dot * q[i];
            }
        }
        let norm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            ortho.push(r.iter().map(|c| c / norm).collect());
        }
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 1e-9;
    for k in 0..n {
        let mut r = vec![0.0; n];
        r[k] = 1.0;
        for q in &ortho {
            let dot: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            for i in 0..n {
                r[i] -= dot * q[i];
            }
        }
        let norm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > best_norm {
            best_norm = norm;
            best = Some(r.iter().map(|c| c / norm).collect());
        }
    }
    best
}

// ---------------------------------------------------------------------------
// primitive patches

/// Zero-dimensional patch: a single point.
pub fn point_patch(at: Vec<f64>) -> SubmanifoldPatch {
    struct P {
        at: Vec<f64>,
    }
    impl Immersion for P {
        fn dim_param(&self) -> usize {
            0
        }
        fn dim_ambient(&self) -> usize {
            self.at.len()
        }
        fn eval_f64(&self, _u: &[f64]) -> Vec<f64> {
            self.at.clone()
        }
        fn eval_jet(&self, _u: &[Jet]) -> Vec<Jet> {
            unreachable!("point patches carry no parameters")
        }
    }
    SubmanifoldPatch::new("point", Box::new(P { at }), Vec::new())
}

/// Straight line `u ↦ origin + u · direction`.
pub fn line_patch(origin: Vec<f64>, direction: Vec<f64>) -> SubmanifoldPatch {
    assert_eq!(origin.len(), direction.len());
    struct P {
        origin: Vec<f64>,
        direction: Vec<f64>,
    }
    impl P {
        fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
            self.origin
                .iter()
                .zip(&self.direction)
                .map(|(&o, &d)| u[0].scale(d) + u[0].cst(o))
                .collect()
        }
    }
    impl Immersion for P {
        fn dim_param(&self) -> usize {
            1
        }
        fn dim_ambient(&self) -> usize {
            self.origin.len()
        }
        fn eval_f64(&self, u: &[f64]) -> Vec<f64> {
            self.map(u)
        }
        fn eval_jet(&self, u: &[Jet]) -> Vec<Jet> {
            self.map(u)
        }
    }
    SubmanifoldPatch::new(
        "line",
        Box::new(P { origin, direction }),
        vec![[-10.0, 10.0]],
    )
}

/// Circle of the given radius in a 2-dimensional chart.
pub fn circle_patch(center: [f64; 2], radius: f64) -> SubmanifoldPatch {
    struct P {
        center: [f64; 2],
        radius: f64,
    }
    impl P {
        fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
            vec![
                u[0].cos().scale(self.radius) + u[0].cst(self.center[0]),
                u[0].sin().scale(self.radius) + u[0].cst(self.center[1]),
            ]
        }
    }
    impl Immersion for P {
        fn dim_param(&self) -> usize {
            1
        }
        fn dim_ambient(&self) -> usize {
            2
        }
        fn eval_f64(&self, u: &[f64]) -> Vec<f64> {
            self.map(u)
        }
        fn eval_jet(&self, u: &[Jet]) -> Vec<Jet> {
            self.map(u)
        }
    }
    SubmanifoldPatch::new(
        "circle",
        Box::new(P { center, radius }),
        vec![[-std::f64::consts::PI, std::f64::consts::PI]],
    )
}

/// Graph patch `u ↦ (u, Σ coeffs[k] uᵏ)` in a 2-dimensional chart.
pub fn graph_patch(coeffs: Vec<f64>) -> SubmanifoldPatch {
    struct P {
        coeffs: Vec<f64>,
    }
    impl P {
        fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
            let mut acc = u[0].cst(0.0);
            for &c in self.coeffs.iter().rev() {
                acc = acc * u[0].clone() + u[0].cst(c);
            }
            vec![u[0].clone(), acc]
        }
    }
    impl Immersion for P {
        fn dim_param(&self) -> usize {
            1
        }
        fn dim_ambient(&self) -> usize {
            2
        }
        fn eval_f64(&self, u: &[f64]) -> Vec<f64> {
            self.map(u)
        }
        fn eval_jet(&self, u: &[Jet]) -> Vec<Jet> {
            self.map(u)
        }
    }
    SubmanifoldPatch::new("graph", Box::new(P { coeffs }), vec![[-10.0, 10.0]])
}

/// Round 2-sphere of the given radius inside a 3-dimensional chart.
pub fn sphere_patch(center: [f64; 3], radius: f64) -> SubmanifoldPatch {
    struct P {
        center: [f64; 3],
        radius: f64,
    }
    impl P {
        fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
            let (polar, azimuth) = (&u[0], &u[1]);
            vec![
                (polar.sin() * azimuth.cos()).scale(self.radius) + polar.cst(self.center[0]),
                (polar.sin() * azimuth.sin()).scale(self.radius) + polar.cst(self.center[1]),
                polar.cos().scale(self.radius) + polar.cst(self.center[2]),
            ]
        }
    }
    impl Immersion for P {
        fn dim_param(&self) -> usize {
            2
        }
        fn dim_ambient(&self) -> usize {
            3
        }
        fn eval_f64(&self, u: &[f64]) -> Vec<f64> {
            self.map(u)
        }
        fn eval_jet(&self, u: &[Jet]) -> Vec<Jet> {
            self.map(u)
        }
    }
    SubmanifoldPatch::new(
        "sphere2",
        Box::new(P { center, radius }),
        vec![[0.2, std::f64::consts::PI - 0.2], [-3.0, 3.0]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use serde_json::Value;

    #[test]
    fn euclidean_axis_normality() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let p = line_patch(vec![0.0, 0.0], vec![1.0, 0.0]);
        let (ok, res) = is_normal(&m, &p, &[0.0], &[0.0, 1.0]).unwrap();
        assert!(ok && res < 1e-15);
        let (ok, res) = is_normal(&m, &p, &[0.0], &[1.0, 1.0]).unwrap();
        assert!(!ok && res > 0.1);
    }

    #[test]
    fn split_on_the_axis() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let p = line_patch(vec![0.0, 0.0], vec![1.0, 0.0]);
        let (tan, nor) = split_tan_nor(&m, &p, &[0.0], &[0.0, 1.0], &[3.0, 4.0]).unwrap();
        assert!((tan[0] - 3.0).abs() < 1e-12 && tan[1].abs() < 1e-12);
        assert!(nor[0].abs() < 1e-12 && (nor[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_restriction_is_an_error() {
        let m = catalog::build("pseudo_euclidean", &Value::Null).unwrap();
        // the lightlike line spanned by (1, 1) is g-orthogonal to itself and
        // its Gram determinant vanishes
        let p = line_patch(vec![0.0, 0.0], vec![1.0, 1.0]);
        let r = split_tan_nor(&m, &p, &[0.0], &[1.0, 1.0], &[1.0, 0.0]);
        assert!(matches!(r, Err(Error::DegenerateRestriction { .. })));
    }

    #[test]
    fn randers_normal_is_not_euclidean_normal() {
        let params: Value = serde_json::json!({ "beta": [0.3, 0.0] });
        let m = catalog::build("randers", &params).unwrap();
        let p = line_patch(vec![0.0, 0.0], vec![1.0, 0.0]);
        let v = normal_section(&m, &p, &[0.0], None).unwrap();
        let g = m.fundamental_tensor(&[0.0, 0.0], &v).unwrap();
        assert!(g.inner(&v, &[1.0, 0.0]).abs() < 1e-9);
        assert!(v[0].abs() > 1e-3, "normal unexpectedly Euclidean: {v:?}");
    }

    #[test]
    fn circle_second_fundamental_forms() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let p = circle_patch([0.0, 0.0], 1.0);
        // at angle 0: point (1, 0), outward unit normal (1, 0), unit tangent (0, 1)
        let n_vec = [1.0, 0.0];
        let u_tan = [0.0, 1.0];
        let s = second_fundamental_form(&m, &p, &[0.0], &n_vec, &u_tan, &u_tan).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-9, "S(U,U) = {s:?}");
        assert!(s[1].abs() < 1e-9);
        let st = normal_second_fundamental_form(&m, &p, &[0.0], &n_vec, &u_tan).unwrap();
        assert!((st[1] - 1.0).abs() < 1e-9, "S̃(U) = {st:?}");
        assert!(st[0].abs() < 1e-9);
    }

    #[test]
    fn hyperplane_forms_vanish() {
        let m = catalog::build("euclidean", &Value::Null).unwrap();
        let p = line_patch(vec![0.0, 1.0], vec![1.0, 0.0]);
        let s = second_fundamental_form(&m, &p, &[0.3], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 0.0])
            .unwrap();
        assert!(s.iter().all(|c| c.abs() < 1e-10));
        let st = normal_second_fundamental_form(&m, &p, &[0.3], &[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(st.iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn locate_finds_circle_points() {
        let p = circle_patch([0.0, 0.0], 1.0);
        let (u, d) = p.locate(&[0.0, 1.0]);
        assert!(d < 1e-10);
        assert!((u[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }
}
