//! Central finite differences with one Richardson extrapolation step.
//!
//! These are the independent oracles the validation suite and the test
//! suites check the jet-based implementations against. They are deliberately
//! kept free of any jet machinery.

/// First derivative of `f` at 0.
pub fn derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let coarse = d(h);
    let fine = d(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Second derivative of `f` at 0.
pub fn second_derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let f0 = f(0.0);
    let d = |h: f64| (f(h) - 2.0 * f0 + f(-h)) / (h * h);
    let coarse = d(h);
    let fine = d(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Mixed partial `∂^α f` at `x` by recursive central differences, Richardson
/// extrapolated at the outermost level.
pub fn mixed_partial(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[usize], h: f64) -> f64 {
    fn stencil(f: &dyn Fn(&[f64]) -> f64, x: &mut [f64], alpha: &mut [usize], h: f64) -> f64 {
        match alpha.iter().position(|&a| a > 0) {
            None => f(x),
            Some(i) => {
                alpha[i] -= 1;
                x[i] += h;
                let plus = stencil(f, x, alpha, h);
                x[i] -= 2.0 * h;
                let minus = stencil(f, x, alpha, h);
                x[i] += h;
                alpha[i] += 1;
                (plus - minus) / (2.0 * h)
            }
        }
    }
    let eval = |h: f64| {
        let mut xs = x.to_vec();
        let mut al = alpha.to_vec();
        stencil(f, &mut xs, &mut al, h)
    };
    let coarse = eval(h);
    let fine = eval(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sin() {
        let d = derivative(|t| (1.0 + t).sin(), 1e-4);
        assert!((d - 1.0f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn mixed_partial_of_product() {
        // f = x0^2 * x1^3, ∂³f/∂x0²∂x1 = 2 * 3 x1² = 6 x1², at (2, 3): 54
        let f = |x: &[f64]| x[0] * x[0] * x[1] * x[1] * x[1];
        let d = mixed_partial(&f, &[2.0, 3.0], &[2, 1], 1e-2);
        assert!((d - 54.0).abs() < 1e-6, "{d}");
    }
}
