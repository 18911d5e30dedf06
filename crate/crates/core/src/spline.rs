//! Not-a-knot cubic spline interpolation for vector-valued samples.
//!
//! Sampled curves and vector fields are represented by these splines; their
//! time derivatives are taken from the spline coefficients. The not-a-knot
//! end conditions keep full fourth-order interpolation accuracy at the ends
//! and reproduce cubic polynomials exactly, which the unit tests exploit as
//! an oracle.

use crate::error::{Error, Result};
use crate::jets::{Jet, JetShape};

/// Piecewise-cubic interpolant of m-component samples on a knot grid.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    ts: Vec<f64>,
    /// `coefs[seg][comp] = [y, b, c, d]` for `y + bτ + cτ² + dτ³`, `τ = t − t_seg`.
    coefs: Vec<Vec<[f64; 4]>>,
    dim: usize,
}

impl CubicSpline {
    /// Fits samples `(ts[i], ys[i])`, `ys[i].len() == dim`. Knots must be
    /// strictly increasing and at least two.
    pub fn fit(ts: &[f64], ys: &[Vec<f64>]) -> Result<CubicSpline> {
        let n = ts.len();
        if n < 2 || ys.len() != n {
            return Err(Error::Invalid(
                "spline needs at least two samples with matching knots".into(),
            ));
        }
        let dim = ys[0].len();
        for w in ts.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Invalid("spline knots must be strictly increasing".into()));
            }
        }
        let mut coefs = vec![vec![[0.0; 4]; dim]; n - 1];
        let mut comp = vec![0.0; n];
        for c in 0..dim {
            for i in 0..n {
                comp[i] = ys[i][c];
            }
            let m = moments(ts, &comp);
            for i in 0..n - 1 {
                let h = ts[i + 1] - ts[i];
                let b = (comp[i + 1] - comp[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
                coefs[i][c] = [comp[i], b, m[i] / 2.0, (m[i + 1] - m[i]) / (6.0 * h)];
            }
        }
        Ok(CubicSpline {
            ts: ts.to_vec(),
            coefs,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn span(&self) -> [f64; 2] {
        [self.ts[0], *self.ts.last().unwrap()]
    }

    pub fn knots(&self) -> &[f64] {
        &self.ts
    }

    fn segment(&self, t: f64) -> usize {
        match self.ts.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.ts.len() - 2),
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = self.segment(t);
        let tau = t - self.ts[s];
        self.coefs[s]
            .iter()
            .map(|&[y, b, c, d]| y + tau * (b + tau * (c + tau * d)))
            .collect()
    }

    pub fn eval_derivative(&self, t: f64, order: usize) -> Vec<f64> {
        let s = self.segment(t);
        let tau = t - self.ts[s];
        self.coefs[s]
            .iter()
            .map(|&[y, b, c, d]| match order {
                0 => y + tau * (b + tau * (c + tau * d)),
                1 => b + tau * (2.0 * c + tau * 3.0 * d),
                2 => 2.0 * c + 6.0 * d * tau,
                3 => 6.0 * d,
                _ => 0.0,
            })
            .collect()
    }

    /// Components as jets in a single `t` direction, up to `order ≤ 4`.
    pub fn eval_jet(&self, t: f64, order: usize) -> Result<Vec<Jet>> {
        let shape = JetShape::get(1, order)?;
        let s = self.segment(t);
        let tau = t - self.ts[s];
        Ok(self.coefs[s]
            .iter()
            .map(|&[y, b, c, d]| {
                // Taylor coefficients of the shifted cubic at τ
                let val = y + tau * (b + tau * (c + tau * d));
                let d1 = b + tau * (2.0 * c + tau * 3.0 * d);
                let d2c = c + 3.0 * d * tau; // S''/2
                let d3c = d; // S'''/6
                let mut j = Jet::constant(shape, val);
                let coeffs = [val, d1, d2c, d3c, 0.0];
                for (k, &v) in coeffs.iter().enumerate().take(order + 1).skip(1) {
                    j.set_coeff(&[k], v);
                }
                j
            })
            .collect())
    }
}

/// Second derivatives at the knots with not-a-knot end conditions.
fn moments(ts: &[f64], y: &[f64]) -> Vec<f64> {
    let n = ts.len();
    if n == 2 {
        return vec![0.0, 0.0];
    }
    let h: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
    if n == 3 {
        // a single parabola through the three points
        let d0 = (y[1] - y[0]) / h[0];
        let d1 = (y[2] - y[1]) / h[1];
        let m = 2.0 * (d1 - d0) / (h[0] + h[1]);
        return vec![m, m, m];
    }
    // Interior equations for M_1..M_{n-2}; M_0 and M_{n-1} eliminated through
    // the not-a-knot relations.
    let k = n - 2;
    let mut sub = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut sup = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for i in 1..=k {
        let d = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        let j = i - 1;
        sub[j] = h[i - 1] / 6.0;
        diag[j] = (h[i - 1] + h[i]) / 3.0;
        sup[j] = h[i] / 6.0;
        rhs[j] = d;
    }
    // M_0 = ((h0+h1) M_1 − h0 M_2) / h1
    diag[0] += sub[0] * (h[0] + h[1]) / h[1];
    sup[0] -= sub[0] * h[0] / h[1];
    sub[0] = 0.0;
    // M_{n-1} = ((h_{n-3}+h_{n-2}) M_{n-2} − h_{n-2} M_{n-3}) / h_{n-3}
    let hm2 = h[n - 2];
    let hm3 = h[n - 3];
    diag[k - 1] += sup[k - 1] * (hm3 + hm2) / hm3;
    sub[k - 1] -= sup[k - 1] * hm2 / hm3;
    sup[k - 1] = 0.0;

    // Thomas elimination
    for i in 1..k {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut mi = vec![0.0; k];
    mi[k - 1] = rhs[k - 1] / diag[k - 1];
    for i in (0..k - 1).rev() {
        mi[i] = (rhs[i] - sup[i] * mi[i + 1]) / diag[i];
    }
    let mut m = vec![0.0; n];
    m[1..=k].copy_from_slice(&mi);
    m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
    m[n - 1] = ((hm3 + hm2) * m[n - 2] - hm2 * m[n - 3]) / hm3;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let p = |t: f64| 2.0 - t + 3.0 * t * t - 0.5 * t * t * t;
        let dp = |t: f64| -1.0 + 6.0 * t - 1.5 * t * t;
        let ts: Vec<f64> = (0..13).map(|i| i as f64 / 12.0).collect();
        let ys: Vec<Vec<f64>> = ts.iter().map(|&t| vec![p(t)]).collect();
        let s = CubicSpline::fit(&ts, &ys).unwrap();
        for &t in &[0.0, 0.013, 0.27, 0.5, 0.77, 0.999, 1.0] {
            assert!((s.eval(t)[0] - p(t)).abs() < 1e-12, "value at {t}");
            assert!(
                (s.eval_derivative(t, 1)[0] - dp(t)).abs() < 1e-11,
                "derivative at {t}"
            );
        }
    }

    #[test]
    fn interpolates_sine_accurately() {
        let n = 256;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<Vec<f64>> = ts
            .iter()
            .map(|&t| vec![(std::f64::consts::PI * t).sin()])
            .collect();
        let s = CubicSpline::fit(&ts, &ys).unwrap();
        for i in 0..200 {
            let t = 0.0025 + i as f64 * 0.005;
            let exact = (std::f64::consts::PI * t).sin();
            let dexact = std::f64::consts::PI * (std::f64::consts::PI * t).cos();
            assert!((s.eval(t)[0] - exact).abs() < 1e-8);
            assert!((s.eval_derivative(t, 1)[0] - dexact).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_decreasing_knots() {
        let r = CubicSpline::fit(&[0.0, 0.0], &[vec![1.0], vec![2.0]]);
        assert!(r.is_err());
    }
}
