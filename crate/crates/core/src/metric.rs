//! Pseudo-Finsler metric on a single coordinate chart.
//!
//! A metric is a Lagrangian `L(x, v)` that is positively 2-homogeneous in `v`
//! on a conic set of admissible vectors, together with a chart-domain
//! predicate and a user admissibility predicate. The fundamental tensor is
//! half the `v`-Hessian of `L`; the Cartan tensor is a quarter of the third
//! `v`-derivative. Both are computed by jet lifts and are exact to roundoff.
//!
//! The "manifold" here is one chart: an open subset of ℝⁿ. Every construction
//! downstream is chart-local, so nothing is lost for the computations this
//! engine performs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::jets::{lift, Dir, Lagrangian, Scalar};

type ChartPredicate = Box<dyn Fn(&[f64]) -> bool + Send + Sync>;
type AdmissiblePredicate = Box<dyn Fn(&[f64], &[f64]) -> bool + Send + Sync>;

/// A pseudo-Finsler metric on one chart.
pub struct MetricDefinition {
    name: String,
    dim: usize,
    lagrangian: Box<dyn Lagrangian>,
    chart: ChartPredicate,
    admissible: AdmissiblePredicate,
    /// |det g| below `threshold × (max row norm)ⁿ` counts as degenerate.
    degeneracy_threshold: f64,
    /// Box from which random chart points are drawn for audits and property
    /// sweeps.
    sample_box: Vec<[f64; 2]>,
    quadratic: bool,
}

impl MetricDefinition {
    pub fn new(name: impl Into<String>, dim: usize, lagrangian: Box<dyn Lagrangian>) -> Self {
        MetricDefinition {
            name: name.into(),
            dim,
            lagrangian,
            chart: Box::new(|_| true),
            admissible: Box::new(|_, v| v.iter().any(|&c| c != 0.0)),
            degeneracy_threshold: 1e-10,
            sample_box: vec![[-1.0, 1.0]; dim],
            quadratic: false,
        }
    }

    pub fn with_chart(mut self, chart: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.chart = Box::new(chart);
        self
    }

    pub fn with_admissible(
        mut self,
        admissible: impl Fn(&[f64], &[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.admissible = Box::new(admissible);
        self
    }

    pub fn with_sample_box(mut self, sample_box: Vec<[f64; 2]>) -> Self {
        assert_eq!(sample_box.len(), self.dim);
        self.sample_box = sample_box;
        self
    }

    pub fn with_degeneracy_threshold(mut self, threshold: f64) -> Self {
        self.degeneracy_threshold = threshold;
        self
    }

    /// Marks the Lagrangian as quadratic in `v` (pseudo-Riemannian); audits
    /// and the validation suite use this to enable closed-form reductions.
    pub fn mark_quadratic(mut self) -> Self {
        self.quadratic = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_quadratic(&self) -> bool {
        self.quadratic
    }

    pub fn lagrangian(&self) -> &dyn Lagrangian {
        self.lagrangian.as_ref()
    }

    pub fn degeneracy_threshold(&self) -> f64 {
        self.degeneracy_threshold
    }

    pub fn sample_box(&self) -> &[[f64; 2]] {
        &self.sample_box
    }

    pub fn in_chart(&self, x: &[f64]) -> bool {
        (self.chart)(x)
    }

    /// User predicate only; full admissibility additionally requires a
    /// nondegenerate fundamental tensor (see [`Self::is_admissible`]).
    pub fn user_admissible(&self, x: &[f64], v: &[f64]) -> bool {
        (self.admissible)(x, v)
    }

    /// True iff the user predicate holds and `g_v` passes the nondegeneracy
    /// threshold. Returns `false` outside the chart.
    pub fn is_admissible(&self, x: &[f64], v: &[f64]) -> bool {
        if !self.in_chart(x) || !self.user_admissible(x, v) {
            return false;
        }
        self.fundamental_tensor(x, v).is_ok()
    }

    /// Evaluates `L(x, v)` after checking chart membership and admissibility.
    pub fn evaluate(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        self.check_admissible(x, v, None)?;
        Ok(self.lagrangian.eval_f64(x, v))
    }

    /// Raw Lagrangian value without admissibility checks.
    pub fn evaluate_unchecked(&self, x: &[f64], v: &[f64]) -> f64 {
        self.lagrangian.eval_f64(x, v)
    }

    pub(crate) fn check_admissible(&self, x: &[f64], v: &[f64], t: Option<f64>) -> Result<()> {
        if !self.in_chart(x) {
            return Err(Error::OutsideChart);
        }
        if !self.user_admissible(x, v) {
            return Err(Error::Inadmissible { t });
        }
        self.fundamental_tensor(x, v).map(|_| ()).map_err(|e| match e {
            Error::DegenerateTensor { .. } => Error::Inadmissible { t },
            other => other,
        })
    }

    /// The fundamental tensor `g_v` at `(x, v)`.
    pub fn fundamental_tensor(&self, x: &[f64], v: &[f64]) -> Result<FundamentalTensor> {
        let g = fundamental_s(self, x, v)?;
        let n = self.dim;
        let mat = DMatrix::from_fn(n, n, |i, j| g[i * n + j]);
        let det = mat.determinant();
        let norm = inf_norm(&mat);
        let threshold = self.degeneracy_threshold * norm.max(f64::MIN_POSITIVE).powi(n as i32);
        if det.abs() < threshold {
            return Err(Error::DegenerateTensor {
                det: det.abs(),
                threshold,
            });
        }
        Ok(FundamentalTensor {
            x: x.to_vec(),
            v: v.to_vec(),
            g: mat,
        })
    }

    /// The Cartan tensor `C_v` at `(x, v)`.
    pub fn cartan_tensor(&self, x: &[f64], v: &[f64]) -> Result<CartanTensor> {
        // the admissibility contract mirrors fundamental_tensor
        self.fundamental_tensor(x, v)?;
        let c = cartan_s(self, x, v)?;
        Ok(CartanTensor {
            x: x.to_vec(),
            v: v.to_vec(),
            dim: self.dim,
            c,
        })
    }

    /// Draws a uniformly random admissible `(x, v)` from the sample box,
    /// with `|v|` of order one. Fails after too many rejections.
    pub fn sample_admissible(&self, rng: &mut impl rand::Rng) -> Result<(Vec<f64>, Vec<f64>)> {
        for _ in 0..500 {
            let x: Vec<f64> = self
                .sample_box
                .iter()
                .map(|&[lo, hi]| rng.gen_range(lo..hi))
                .collect();
            if !self.in_chart(&x) {
                continue;
            }
            let v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 0.2 {
                continue;
            }
            if self.is_admissible(&x, &v) {
                return Ok((x, v));
            }
        }
        Err(Error::Invalid(format!(
            "could not sample an admissible (x, v) for metric '{}'",
            self.name
        )))
    }

    /// Checks the homogeneity and symmetry identities of the metric over
    /// random admissible samples and reports the worst violations.
    pub fn audit(&self, samples: usize, seed: u64) -> Result<AuditReport> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim;
        let mut entries = vec![
            AuditEntry::new("L 2-homogeneity"),
            AuditEntry::new("g 0-homogeneity"),
            AuditEntry::new("g_v(v,v) = L(v)"),
            AuditEntry::new("Cartan (-1)-homogeneity"),
            AuditEntry::new("Cartan total symmetry"),
            AuditEntry::new("C_v(v,.,.) = 0"),
        ];
        for _ in 0..samples {
            let (x, v) = self.sample_admissible(&mut rng)?;
            let l = self.lagrangian.eval_f64(&x, &v);
            let scale = l.abs().max(1.0);
            for &lambda in &[0.5, 2.0, 7.0] {
                let vl: Vec<f64> = v.iter().map(|c| c * lambda).collect();
                let ll = self.lagrangian.eval_f64(&x, &vl);
                entries[0].record((ll - lambda * lambda * l).abs() / scale);
            }
            let g = self.fundamental_tensor(&x, &v)?;
            let gnorm = inf_norm(&g.g).max(1.0);
            for &lambda in &[0.5, 2.0] {
                let vl: Vec<f64> = v.iter().map(|c| c * lambda).collect();
                if let Ok(gl) = self.fundamental_tensor(&x, &vl) {
                    let mut worst: f64 = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            worst = worst.max((gl.g[(i, j)] - g.g[(i, j)]).abs());
                        }
                    }
                    entries[1].record(worst / gnorm);
                }
            }
            entries[2].record((g.inner(&v, &v) - l).abs() / scale);
            let c = self.cartan_tensor(&x, &v)?;
            for &lambda in &[0.5, 2.0] {
                let vl: Vec<f64> = v.iter().map(|k| k * lambda).collect();
                if let Ok(cl) = self.cartan_tensor(&x, &vl) {
                    let mut worst: f64 = 0.0;
                    for idx in 0..n * n * n {
                        worst = worst.max((lambda * cl.c[idx] - c.c[idx]).abs());
                    }
                    entries[3].record(worst);
                }
            }
            entries[4].record(cartan_permutation_residual(self, &x, &v)?);
            let mut contraction: f64 = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += c.get(i, j, k) * v[i];
                    }
                    contraction = contraction.max(s.abs());
                }
            }
            entries[5].record(contraction);
        }
        Ok(AuditReport {
            metric: self.name.clone(),
            samples,
            entries,
        })
    }
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Symmetric bilinear form `g_v` anchored at a base point.
pub struct FundamentalTensor {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    g: DMatrix<f64>,
}

impl FundamentalTensor {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn inner(&self, u: &[f64], w: &[f64]) -> f64 {
        let n = self.g.nrows();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.g[(i, j)] * u[i] * w[j];
            }
        }
        s
    }

    /// Lowers an index: returns the covector `g_v(u, ·)` as components.
    pub fn lower(&self, u: &[f64]) -> Vec<f64> {
        let n = self.g.nrows();
        (0..n)
            .map(|j| (0..n).map(|i| self.g[(i, j)] * u[i]).sum())
            .collect()
    }

    pub fn det(&self) -> f64 {
        self.g.determinant()
    }
}

/// Totally symmetric trilinear form `C_v` anchored at a base point.
pub struct CartanTensor {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    dim: usize,
    /// Dense components, index `(i·n + j)·n + k`.
    c: Vec<f64>,
}

impl CartanTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn contract(&self, w1: &[f64], w2: &[f64], w3: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += self.get(i, j, k) * w1[i] * w2[j] * w3[k];
                }
            }
        }
        s
    }

    pub fn components(&self) -> &[f64] {
        &self.c
    }
}

/// One named check inside an audit report.
#[derive(Clone, Debug)]
pub struct AuditEntry {
    pub check: String,
    pub max_violation: f64,
}

impl AuditEntry {
    fn new(check: &str) -> AuditEntry {
        AuditEntry {
            check: check.into(),
            max_violation: 0.0,
        }
    }
    fn record(&mut self, v: f64) {
        if v > self.max_violation {
            self.max_violation = v;
        }
    }
}

/// Result of [`MetricDefinition::audit`].
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub metric: String,
    pub samples: usize,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn max_violation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_violation)
            .fold(0.0, f64::max)
    }
}

/// Fundamental tensor over a generic scalar: `g_ij = ½ ∂²L/∂vⁱ∂vʲ`,
/// row-major `n×n`.
pub fn fundamental_s<S: Scalar>(m: &MetricDefinition, x: &[S], v: &[S]) -> Result<Vec<S>> {
    let n = m.dim();
    let zero = x[0].cst(0.0);
    let mut g = vec![zero; n * n];
    for i in 0..n {
        for j in i..n {
            let gij = if i == j {
                lift(m.lagrangian(), x, v, &[Dir::V(i)], 2)?.coeff(&[2])
            } else {
                lift(m.lagrangian(), x, v, &[Dir::V(i), Dir::V(j)], 2)?
                    .coeff(&[1, 1])
                    .scale(0.5)
            };
            g[i * n + j] = gij.clone();
            g[j * n + i] = gij;
        }
    }
    Ok(g)
}

/// Cartan tensor over a generic scalar: `C_ijk = ¼ ∂³L/∂vⁱ∂vʲ∂vᵏ`, dense `n³`.
pub fn cartan_s<S: Scalar>(m: &MetricDefinition, x: &[S], v: &[S]) -> Result<Vec<S>> {
    let n = m.dim();
    let zero = x[0].cst(0.0);
    let mut c = vec![zero; n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let value = if i == j && j == k {
                    lift(m.lagrangian(), x, v, &[Dir::V(i)], 3)?
                        .partial(&[3])
                        .scale(0.25)
                } else if i == j {
                    lift(m.lagrangian(), x, v, &[Dir::V(i), Dir::V(k)], 3)?
                        .partial(&[2, 1])
                        .scale(0.25)
                } else if j == k {
                    lift(m.lagrangian(), x, v, &[Dir::V(i), Dir::V(j)], 3)?
                        .partial(&[1, 2])
                        .scale(0.25)
                } else {
                    lift(m.lagrangian(), x, v, &[Dir::V(i), Dir::V(j), Dir::V(k)], 3)?
                        .partial(&[1, 1, 1])
                        .scale(0.25)
                };
                for (a, b, d) in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    c[(a * n + b) * n + d] = value.clone();
                }
            }
        }
    }
    Ok(c)
}

/// `∂g_jk/∂xⁱ = ½ ∂³L/∂vʲ∂vᵏ∂xⁱ` over a generic scalar, row-major `n×n`.
pub fn dg_dx_s<S: Scalar>(m: &MetricDefinition, x: &[S], v: &[S], i: usize) -> Result<Vec<S>> {
    let n = m.dim();
    let zero = x[0].cst(0.0);
    let mut dg = vec![zero; n * n];
    for j in 0..n {
        for k in j..n {
            let value = if j == k {
                lift(m.lagrangian(), x, v, &[Dir::V(j), Dir::X(i)], 3)?
                    .partial(&[2, 1])
                    .scale(0.5)
            } else {
                lift(m.lagrangian(), x, v, &[Dir::V(j), Dir::V(k), Dir::X(i)], 3)?
                    .partial(&[1, 1, 1])
                    .scale(0.5)
            };
            dg[j * n + k] = value.clone();
            dg[k * n + j] = value;
        }
    }
    Ok(dg)
}

/// Inverts a row-major `n×n` matrix of scalars by Gauss-Jordan elimination
/// with partial pivoting on leading values. Degeneracy is judged against
/// `threshold × (max row norm)ⁿ`.
pub fn invert_s<S: Scalar>(a: &[S], n: usize, rel_threshold: f64) -> Result<Vec<S>> {
    let mut work: Vec<S> = a.to_vec();
    let zero = a[0].cst(0.0);
    let one = a[0].cst(1.0);
    let mut inv: Vec<S> = (0..n * n)
        .map(|idx| if idx % (n + 1) == 0 { one.clone() } else { zero.clone() })
        .collect();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].value().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let threshold = rel_threshold * norm.max(f64::MIN_POSITIVE).powi(n as i32);
    let mut det = 1.0f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                work[r1 * n + col]
                    .value()
                    .abs()
                    .partial_cmp(&work[r2 * n + col].value().abs())
                    .unwrap()
            })
            .unwrap();
        let pivot_value = work[pivot_row * n + col].value();
        if pivot_value == 0.0 || !pivot_value.is_finite() {
            return Err(Error::DegenerateTensor {
                det: 0.0,
                threshold,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                work.swap(col * n + j, pivot_row * n + j);
                inv.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        det *= pivot_value;
        let pivot = work[col * n + col].clone();
        for j in 0..n {
            work[col * n + j] = work[col * n + j].clone() / pivot.clone();
            inv[col * n + j] = inv[col * n + j].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = work[r * n + col].clone();
            if factor.value() == 0.0 && factor.jet_dims() == 0 {
                continue;
            }
            for j in 0..n {
                work[r * n + j] =
                    work[r * n + j].clone() - factor.clone() * work[col * n + j].clone();
                inv[r * n + j] =
                    inv[r * n + j].clone() - factor.clone() * inv[col * n + j].clone();
            }
        }
    }
    if det.abs() < threshold {
        return Err(Error::DegenerateTensor {
            det: det.abs(),
            threshold,
        });
    }
    Ok(inv)
}

/// Max disagreement between the six slot orderings of a Cartan component,
/// each computed through its own lift. Exercises the total symmetry that
/// characterizes tensors coming from a Lagrangian.
fn cartan_permutation_residual(m: &MetricDefinition, x: &[f64], v: &[f64]) -> Result<f64> {
    use rand::Rng;
    use rand::SeedableRng;
    let n = m.dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
        x.iter().chain(v.iter()).fold(0u64, |acc, &c| {
            acc.wrapping_mul(31).wrapping_add(c.to_bits())
        }),
    );
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    let k = rng.gen_range(0..n);
    let mut values = Vec::new();
    for perm in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
        values.push(cartan_component_ordered(m, x, v, perm)?);
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(hi - lo)
}

/// One Cartan component computed with the directions declared in the given
/// slot order (repeats merged into higher exponents in place).
fn cartan_component_ordered(
    m: &MetricDefinition,
    x: &[f64],
    v: &[f64],
    slots: [usize; 3],
) -> Result<f64> {
    let mut dirs: Vec<usize> = Vec::new();
    let mut expo: Vec<usize> = Vec::new();
    for s in slots {
        if let Some(p) = dirs.iter().position(|&d| d == s) {
            expo[p] += 1;
        } else {
            dirs.push(s);
            expo.push(1);
        }
    }
    let dir_list: Vec<Dir> = dirs.iter().map(|&d| Dir::V(d)).collect();
    let lifted = lift(m.lagrangian(), x, v, &dir_list, 3)?;
    Ok(lifted.partial(&expo) * 0.25)
}
