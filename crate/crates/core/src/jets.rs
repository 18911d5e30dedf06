//! Truncated multivariate Taylor ("jet") arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients of a scalar quantity with respect
//! to a small set of perturbation directions (at most 4 at a time), truncated
//! at a total order of at most 4. Arithmetic on jets is exact for polynomial
//! composition up to the truncation order, so every partial derivative the
//! geometry engine needs (of the Lagrangian, of assembled tensors, and of
//! whole computational pipelines such as the spray) comes out of a forward
//! pass rather than a finite-difference stencil.
//!
//! The coefficient of a multi-index `α` is the Taylor coefficient
//! `∂^α f / α!`, not the bare partial derivative.
//!
//! Derivatives of *assembled* quantities are obtained by evaluating the
//! assembly code generically over the [`Scalar`] trait: with `S = f64` the
//! pipeline produces plain values, with `S = Jet` it produces the value
//! together with its derivatives along the jet's directions. [`lift`]
//! supports base points whose components are themselves jets by flattening
//! into a single jet over the combined direction set, which is exact for
//! truncated Taylor composition.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Maximum number of simultaneous perturbation directions.
pub const MAX_DIMS: usize = 4;
/// Maximum total derivative order.
pub const MAX_ORDER: usize = 4;

/// Layout of a jet: index tables for all multi-indices over `dims` directions
/// with total degree at most `order`.
pub struct JetShape {
    pub dims: usize,
    pub order: usize,
    /// Multi-index exponents per coefficient slot.
    idx: Vec<[u8; MAX_DIMS]>,
    /// α! per slot.
    fact: Vec<f64>,
    /// Base-5 code → slot, `u16::MAX` when the code exceeds the order.
    pos_of_code: Vec<u16>,
    /// Precomputed (a, b, dest) triples for truncated products.
    mul_plan: Vec<(u16, u16, u16)>,
}

fn pow5(n: usize) -> usize {
    5usize.pow(n as u32)
}

impl JetShape {
    fn build(dims: usize, order: usize) -> JetShape {
        let mut idx: Vec<[u8; MAX_DIMS]> = Vec::new();
        // Enumerate by total degree, then by code, so slot 0 is the value.
        for d in 0..=order {
            let mut alpha = [0u8; MAX_DIMS];
            enumerate_degree(dims, d, 0, &mut alpha, &mut idx);
        }
        idx.sort_by_key(|a| {
            let deg: u32 = a.iter().map(|&x| x as u32).sum();
            (deg, code_of(a, dims))
        });
        let deg: Vec<u8> = idx.iter().map(|a| a.iter().sum()).collect();
        let fact: Vec<f64> = idx
            .iter()
            .map(|a| a.iter().map(|&e| factorial(e as usize)).product())
            .collect();
        let mut pos_of_code = vec![u16::MAX; pow5(dims)];
        for (p, a) in idx.iter().enumerate() {
            pos_of_code[code_of(a, dims)] = p as u16;
        }
        let mut mul_plan = Vec::new();
        for (i, a) in idx.iter().enumerate() {
            for (j, b) in idx.iter().enumerate() {
                if (deg[i] + deg[j]) as usize <= order {
                    let mut sum = [0u8; MAX_DIMS];
                    for k in 0..dims {
                        sum[k] = a[k] + b[k];
                    }
                    let dest = pos_of_code[code_of(&sum, dims)];
                    mul_plan.push((i as u16, j as u16, dest));
                }
            }
        }
        JetShape {
            dims,
            order,
            idx,
            fact,
            pos_of_code,
            mul_plan,
        }
    }

    /// Shared shape table. Shapes exist for `dims ≤ 4`, `order ≤ 4`.
    pub fn get(dims: usize, order: usize) -> Result<&'static JetShape> {
        if dims > MAX_DIMS || order > MAX_ORDER {
            return Err(Error::JetDomain(format!(
                "jet shape ({dims} dirs, order {order}) exceeds the supported ({MAX_DIMS}, {MAX_ORDER})"
            )));
        }
        static SHAPES: OnceLock<Vec<JetShape>> = OnceLock::new();
        let all = SHAPES.get_or_init(|| {
            let mut v = Vec::with_capacity((MAX_DIMS + 1) * (MAX_ORDER + 1));
            for d in 0..=MAX_DIMS {
                for k in 0..=MAX_ORDER {
                    v.push(JetShape::build(d, k));
                }
            }
            v
        });
        Ok(&all[dims * (MAX_ORDER + 1) + order])
    }

    /// Number of coefficient slots.
    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn pos(&self, alpha: &[usize]) -> Option<usize> {
        let mut code = 0usize;
        let mut total = 0usize;
        for (i, &e) in alpha.iter().enumerate() {
            if i >= self.dims && e > 0 {
                return None;
            }
            total += e;
            code += e * pow5(i);
        }
        if total > self.order {
            return None;
        }
        let p = self.pos_of_code[code];
        (p != u16::MAX).then_some(p as usize)
    }
}

fn enumerate_degree(
    dims: usize,
    remaining: usize,
    at: usize,
    alpha: &mut [u8; MAX_DIMS],
    out: &mut Vec<[u8; MAX_DIMS]>,
) {
    if at == dims {
        if remaining == 0 {
            out.push(*alpha);
        }
        return;
    }
    for e in 0..=remaining {
        alpha[at] = e as u8;
        enumerate_degree(dims, remaining - e, at + 1, alpha, out);
    }
    alpha[at] = 0;
}

fn code_of(alpha: &[u8; MAX_DIMS], dims: usize) -> usize {
    let mut code = 0usize;
    for i in 0..dims {
        code += alpha[i] as usize * pow5(i);
    }
    code
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A truncated Taylor expansion.
///
/// Domain violations (division by a jet with zero leading value, `sqrt`/`ln`
/// of a nonpositive leading value) poison the result instead of silently
/// producing NaN; the poison surfaces as an error at the [`lift`] boundary.
#[derive(Clone)]
pub struct Jet {
    shape: &'static JetShape,
    c: Vec<f64>,
    bad: bool,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("dims", &self.shape.dims)
            .field("order", &self.shape.order)
            .field("c", &self.c)
            .field("bad", &self.bad)
            .finish()
    }
}

impl Jet {
    pub fn constant(shape: &'static JetShape, value: f64) -> Jet {
        let mut c = vec![0.0; shape.len()];
        c[0] = value;
        Jet {
            shape,
            c,
            bad: false,
        }
    }

    /// Constant jet plus a unit first-order coefficient in direction `dim`.
    pub fn variable(shape: &'static JetShape, value: f64, dim: usize) -> Jet {
        let mut j = Jet::constant(shape, value);
        j.add_seed(dim, 1.0);
        j
    }

    /// Sets the Taylor coefficient at `alpha` (panics if out of shape).
    pub fn set_coeff(&mut self, alpha: &[usize], v: f64) {
        let p = self
            .shape
            .pos(alpha)
            .expect("multi-index outside the jet shape");
        self.c[p] = v;
    }

    /// Adds `w` to the first-order coefficient of direction `dim`.
    pub fn add_seed(&mut self, dim: usize, w: f64) {
        assert!(dim < self.shape.dims, "seed direction out of range");
        assert!(self.shape.order >= 1, "order-0 jet cannot carry seeds");
        let p = self.shape.pos_of_code[pow5(dim)] as usize;
        self.c[p] += w;
    }

    pub fn shape(&self) -> &'static JetShape {
        self.shape
    }

    /// Leading (order-0) value.
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient `∂^α f / α!` for the multi-index `alpha`.
    pub fn coeff(&self, alpha: &[usize]) -> f64 {
        match self.shape.pos(alpha) {
            Some(p) => self.c[p],
            None => 0.0,
        }
    }

    /// Plain partial derivative `∂^α f` (the coefficient times `α!`).
    pub fn partial(&self, alpha: &[usize]) -> f64 {
        match self.shape.pos(alpha) {
            Some(p) => self.c[p] * self.shape.fact[p],
            None => 0.0,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn poisoned(&self) -> bool {
        self.bad
    }

    fn poison(shape: &'static JetShape) -> Jet {
        Jet {
            shape,
            c: vec![f64::NAN; shape.len()],
            bad: true,
        }
    }

    fn same_shape(&self, other: &Jet) {
        assert!(
            std::ptr::eq(self.shape, other.shape),
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.shape.dims,
            self.shape.order,
            other.shape.dims,
            other.shape.order
        );
    }

    /// Composes `f ∘ self` given the scaled derivatives
    /// `derivs[m] = f^(m)(value) / m!`.
    ///
    /// Exact for the truncated algebra: the nilpotent part of a jet vanishes
    /// at powers above the order, so Horner evaluation terminates.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let k = self.shape.order;
        debug_assert!(derivs.len() >= k + 1);
        let mut tilde = self.clone();
        tilde.c[0] = 0.0;
        let mut out = Jet::constant(self.shape, derivs[k]);
        out.bad = self.bad;
        for m in (0..k).rev() {
            out = &out * &tilde;
            out.c[0] += derivs[m];
        }
        out
    }

    pub fn sqrt(&self) -> Jet {
        let a = self.value();
        if !(a > 0.0) {
            return Jet::poison(self.shape);
        }
        // f^(m)(a) = (1/2)(1/2-1)...(1/2-m+1) a^{1/2-m}
        let mut derivs = [0.0; MAX_ORDER + 1];
        derivs[0] = a.sqrt();
        let mut coef = 1.0;
        for m in 1..=self.shape.order {
            coef *= 0.5 - (m as f64 - 1.0);
            derivs[m] = coef * a.powf(0.5 - m as f64) / factorial(m);
        }
        self.compose(&derivs)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut derivs = [0.0; MAX_ORDER + 1];
        for (m, d) in derivs.iter_mut().enumerate().take(self.shape.order + 1) {
            *d = e / factorial(m);
        }
        self.compose(&derivs)
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        if !(a > 0.0) {
            return Jet::poison(self.shape);
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        derivs[0] = a.ln();
        // ln^(m)(a)/m! = (-1)^{m-1}/(m a^m)
        let mut sign = 1.0;
        for m in 1..=self.shape.order {
            derivs[m] = sign / (m as f64 * a.powi(m as i32));
            sign = -sign;
        }
        self.compose(&derivs)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut derivs = [0.0; MAX_ORDER + 1];
        for (m, d) in derivs.iter_mut().enumerate().take(self.shape.order + 1) {
            *d = cycle[m % 4] / factorial(m);
        }
        self.compose(&derivs)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let mut derivs = [0.0; MAX_ORDER + 1];
        for (m, d) in derivs.iter_mut().enumerate().take(self.shape.order + 1) {
            *d = cycle[m % 4] / factorial(m);
        }
        self.compose(&derivs)
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Jet::poison(self.shape);
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        // (1/t)^(m)(a)/m! = (-1)^m / a^{m+1}
        let mut d = 1.0 / a;
        derivs[0] = d;
        for m in 1..=self.shape.order {
            d = -d / a;
            derivs[m] = d;
        }
        self.compose(&derivs)
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet::constant(self.shape, 1.0);
        acc.bad = self.bad;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn powf(&self, p: f64) -> Jet {
        let a = self.value();
        if !(a > 0.0) {
            return Jet::poison(self.shape);
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut coef = 1.0;
        derivs[0] = a.powf(p);
        for m in 1..=self.shape.order {
            coef *= p - (m as f64 - 1.0);
            derivs[m] = coef * a.powf(p - m as f64) / factorial(m);
        }
        self.compose(&derivs)
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut out = self.clone();
        for x in &mut out.c {
            *x *= k;
        }
        out
    }

    fn invalid(&self) -> bool {
        self.bad || self.c.iter().any(|x| !x.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.same_shape(&rhs);
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += *b;
        }
        self.bad |= rhs.bad;
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.same_shape(&rhs);
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= *b;
        }
        self.bad |= rhs.bad;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in &mut self.c {
            *a = -*a;
        }
        self
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let mut out = Jet {
            shape: self.shape,
            c: vec![0.0; self.c.len()],
            bad: self.bad || rhs.bad,
        };
        for &(i, j, dest) in &self.shape.mul_plan {
            out.c[dest as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        &self * &rhs.recip()
    }
}

/// Scalar abstraction over `f64` and [`Jet`].
///
/// Geometry pipelines (fundamental tensor, spray, Christoffel symbols, ...)
/// are written once over `S: Scalar`. Instantiated at `Jet`, a pipeline
/// yields its own derivatives along the jet's directions, which is how
/// derivatives of assembled quantities (e.g. `∂G/∂v`) are obtained without
/// re-deriving formulas.
pub trait Scalar:
    Clone
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape as `self`.
    fn cst(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn scale(&self, k: f64) -> Self;
    fn is_invalid(&self) -> bool;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Number of jet directions carried by this scalar (0 for `f64`).
    fn jet_dims(&self) -> usize;
    fn jet_order(&self) -> usize;
    /// Embeds into a flat jet whose low direction slots are this scalar's own.
    fn promote(&self, shape: &'static JetShape) -> Jet;
    /// Extracts the sub-jet over the own directions at a fixed multi-index of
    /// the added directions; `inner_shifted_code` is the added multi-index's
    /// base-5 code already shifted past the own directions.
    fn demote(flat: &Jet, proto: &Self, inner_shifted_code: usize) -> Self;
}

impl Scalar for f64 {
    fn cst(&self, c: f64) -> f64 {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, k: f64) -> f64 {
        self * k
    }
    fn is_invalid(&self) -> bool {
        !self.is_finite()
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn sin(&self) -> f64 {
        f64::sin(*self)
    }
    fn cos(&self) -> f64 {
        f64::cos(*self)
    }
    fn powi(&self, n: i32) -> f64 {
        f64::powi(*self, n)
    }
    fn powf(&self, p: f64) -> f64 {
        f64::powf(*self, p)
    }
    fn jet_dims(&self) -> usize {
        0
    }
    fn jet_order(&self) -> usize {
        0
    }
    fn promote(&self, shape: &'static JetShape) -> Jet {
        Jet::constant(shape, *self)
    }
    fn demote(flat: &Jet, _proto: &f64, inner_shifted_code: usize) -> f64 {
        let p = flat.shape.pos_of_code[inner_shifted_code];
        if p == u16::MAX {
            0.0
        } else {
            flat.c[p as usize]
        }
    }
}

impl Scalar for Jet {
    fn cst(&self, c: f64) -> Jet {
        Jet::constant(self.shape, c)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn scale(&self, k: f64) -> Jet {
        Jet::scale(self, k)
    }
    fn is_invalid(&self) -> bool {
        self.invalid()
    }
    fn sqrt(&self) -> Jet {
        Jet::sqrt(self)
    }
    fn exp(&self) -> Jet {
        Jet::exp(self)
    }
    fn ln(&self) -> Jet {
        Jet::ln(self)
    }
    fn sin(&self) -> Jet {
        Jet::sin(self)
    }
    fn cos(&self) -> Jet {
        Jet::cos(self)
    }
    fn powi(&self, n: i32) -> Jet {
        Jet::powi(self, n)
    }
    fn powf(&self, p: f64) -> Jet {
        Jet::powf(self, p)
    }
    fn jet_dims(&self) -> usize {
        self.shape.dims
    }
    fn jet_order(&self) -> usize {
        self.shape.order
    }
    fn promote(&self, shape: &'static JetShape) -> Jet {
        if std::ptr::eq(self.shape, shape) {
            return self.clone();
        }
        debug_assert!(shape.dims >= self.shape.dims && shape.order >= self.shape.order);
        let mut out = Jet::constant(shape, 0.0);
        out.bad = self.bad;
        for (p, alpha) in self.shape.idx.iter().enumerate() {
            // own codes agree because own directions keep the low slots
            let code = code_of(alpha, self.shape.dims);
            let dest = shape.pos_of_code[code];
            debug_assert!(dest != u16::MAX);
            out.c[dest as usize] = self.c[p];
        }
        out
    }
    fn demote(flat: &Jet, proto: &Jet, inner_shifted_code: usize) -> Jet {
        let mut out = Jet::constant(proto.shape, 0.0);
        out.bad = flat.bad;
        for (p, alpha) in proto.shape.idx.iter().enumerate() {
            let code = code_of(alpha, proto.shape.dims) + inner_shifted_code;
            let src = flat.shape.pos_of_code[code];
            if src != u16::MAX {
                out.c[p] = flat.c[src as usize];
            }
        }
        out
    }
}

/// A perturbation direction of the `(x, v)` base point of a lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    /// Coordinate direction `∂/∂xⁱ`.
    X(usize),
    /// Coordinate direction `∂/∂vⁱ`.
    V(usize),
}

/// A scalar function of `(x, v)` evaluable on jets. This is the form in which
/// Lagrangians are plugged into the engine: implementors route both methods
/// through one private function generic over [`Scalar`].
pub trait Lagrangian: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_f64(&self, x: &[f64], v: &[f64]) -> f64;
    fn eval_jet(&self, x: &[Jet], v: &[Jet]) -> Jet;
}

/// Result of a [`lift`]: Taylor coefficients in the lifted directions, each
/// coefficient a scalar of the base point's own type.
pub struct Lift<S: Scalar> {
    flat: Jet,
    proto: S,
    own_dims: usize,
    inner_dims: usize,
    inner_order: usize,
}

impl<S: Scalar> Lift<S> {
    /// Taylor coefficient `∂^α f / α!` in the lifted directions.
    pub fn coeff(&self, alpha: &[usize]) -> S {
        debug_assert!(alpha.len() <= self.inner_dims);
        let mut code = 0usize;
        let mut total = 0usize;
        for (i, &e) in alpha.iter().enumerate() {
            code += e * pow5(self.own_dims + i);
            total += e;
        }
        debug_assert!(total <= self.inner_order);
        S::demote(&self.flat, &self.proto, code)
    }

    /// Plain partial derivative `∂^α f` in the lifted directions.
    pub fn partial(&self, alpha: &[usize]) -> S {
        let mut fact = 1.0;
        for &e in alpha {
            fact *= factorial(e);
        }
        self.coeff(alpha).scale(fact)
    }

    pub fn value(&self) -> S {
        self.coeff(&[])
    }
}

/// Evaluates the Taylor expansion of `f` at `(x, v)` along the given
/// coordinate directions up to `order`.
///
/// The base point components may themselves be jets; their directions are
/// kept and the lift directions are appended, so the combined direction count
/// and order must stay within the supported maxima.
pub fn lift<S: Scalar>(
    f: &dyn Lagrangian,
    x: &[S],
    v: &[S],
    dirs: &[Dir],
    order: usize,
) -> Result<Lift<S>> {
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            if a == b {
                return Err(Error::JetDomain("lift directions must be distinct".into()));
            }
        }
    }
    let proto = x[0].clone();
    let own_dims = proto.jet_dims();
    let own_order = proto.jet_order();
    let shape = JetShape::get(own_dims + dirs.len(), own_order + order)?;
    let mut xj: Vec<Jet> = x.iter().map(|s| s.promote(shape)).collect();
    let mut vj: Vec<Jet> = v.iter().map(|s| s.promote(shape)).collect();
    for (k, d) in dirs.iter().enumerate() {
        match *d {
            Dir::X(i) => xj[i].add_seed(own_dims + k, 1.0),
            Dir::V(i) => vj[i].add_seed(own_dims + k, 1.0),
        }
    }
    let out = f.eval_jet(&xj, &vj);
    if out.invalid() {
        return Err(Error::JetDomain(format!(
            "function not evaluable at the jet base point (value {})",
            out.value()
        )));
    }
    Ok(Lift {
        flat: out,
        proto,
        own_dims,
        inner_dims: dirs.len(),
        inner_order: order,
    })
}

/// A parametric map `u ∈ ℝʳ → x ∈ ℝⁿ` evaluable on jets (submanifold
/// immersions).
pub trait Immersion: Send + Sync {
    fn dim_param(&self) -> usize;
    fn dim_ambient(&self) -> usize;
    fn eval_f64(&self, u: &[f64]) -> Vec<f64>;
    fn eval_jet(&self, u: &[Jet]) -> Vec<Jet>;
}

/// Lifts an immersion along parameter directions `dirs` (indices into `u`).
pub fn lift_immersion(
    f: &dyn Immersion,
    u: &[f64],
    dirs: &[usize],
    order: usize,
) -> Result<Vec<Jet>> {
    let shape = JetShape::get(dirs.len(), order)?;
    let mut uj: Vec<Jet> = u.iter().map(|&s| Jet::constant(shape, s)).collect();
    for (k, &i) in dirs.iter().enumerate() {
        uj[i].add_seed(k, 1.0);
    }
    let out = f.eval_jet(&uj);
    for j in &out {
        if j.invalid() {
            return Err(Error::JetDomain(
                "immersion not evaluable at the jet base point".into(),
            ));
        }
    }
    Ok(out)
}
