//! Composite Gauss–Legendre quadrature (order 8 per panel).

use crate::error::Result;

/// Gauss–Legendre nodes on [-1, 1], 8 points.
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// Weights matching [`GL8_NODES`].
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_29,
    0.362_683_783_378_361_98,
    0.362_683_783_378_361_98,
    0.313_706_645_877_887_29,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Quadrature nodes and weights over the given panel knots.
pub fn nodes(panels: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity((panels.len() - 1) * 8);
    for w in panels.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&xi, &wi) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            out.push((mid + half * xi, half * wi));
        }
    }
    out
}

/// Integrates `f` over the panels.
pub fn integrate(mut f: impl FnMut(f64) -> Result<f64>, panels: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (t, w) in nodes(panels) {
        acc += w * f(t)?;
    }
    Ok(acc)
}

/// Splits `[a, b]` into `n` equal panels.
pub fn uniform_panels(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // degree 15 is exact for 8-point Gauss
        let v = integrate(|t| Ok(t.powi(15) + 3.0 * t * t), &[0.0, 1.0]).unwrap();
        assert!((v - (1.0 / 16.0 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn composite_sine() {
        let panels = uniform_panels(0.0, std::f64::consts::PI, 4);
        let v = integrate(|t| Ok(t.sin()), &panels).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }
}
