//! Adaptive Runge–Kutta–Fehlberg 4(5) integration with cubic-Hermite dense
//! output, plus a fixed-step classical RK4 for bit-reproducible runs.
//!
//! The integrator advances with the fifth-order solution and controls the
//! embedded 4th/5th-order error estimate against mixed absolute/relative
//! tolerances. A caller-supplied guard predicate is checked after every
//! accepted step; when it trips, the exit time is refined by bisection on the
//! dense output to 1e-9 and integration stops there.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeMethod {
    Rkf45,
    /// Classical RK4 with the given fixed step.
    Rk4 { step: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the step size; protects the accuracy of the dense output.
    pub max_step: f64,
    pub method: OdeMethod,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.02,
            method: OdeMethod::Rkf45,
        }
    }
}

struct StepRecord {
    t0: f64,
    t1: f64,
    y0: Vec<f64>,
    f0: Vec<f64>,
    y1: Vec<f64>,
    f1: Vec<f64>,
}

/// Piecewise cubic-Hermite representation of an integrated trajectory.
pub struct DenseOutput {
    steps: Vec<StepRecord>,
    dim: usize,
}

impl DenseOutput {
    pub fn span(&self) -> [f64; 2] {
        [self.steps[0].t0, self.steps.last().unwrap().t1]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Accepted step endpoints, including both span ends.
    pub fn step_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.steps.iter().map(|s| s.t0).collect();
        ts.push(self.steps.last().unwrap().t1);
        ts
    }

    fn locate(&self, t: f64) -> &StepRecord {
        let mut lo = 0usize;
        let mut hi = self.steps.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if t <= self.steps[mid].t1 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        &self.steps[lo]
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.eval_with_derivative(t).0
    }

    /// Hermite value and first derivative at `t`.
    pub fn eval_with_derivative(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let s = self.locate(t);
        let h = s.t1 - s.t0;
        let u = (t - s.t0) / h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let dh00 = (6.0 * u2 - 6.0 * u) / h;
        let dh10 = (3.0 * u2 - 4.0 * u + 1.0) / h;
        let dh01 = (-6.0 * u2 + 6.0 * u) / h;
        let dh11 = (3.0 * u2 - 2.0 * u) / h;
        let mut y = vec![0.0; self.dim];
        let mut dy = vec![0.0; self.dim];
        for i in 0..self.dim {
            y[i] = h00 * s.y0[i] + h10 * h * s.f0[i] + h01 * s.y1[i] + h11 * h * s.f1[i];
            dy[i] = dh00 * s.y0[i] + dh10 * h * s.f0[i] + dh01 * s.y1[i] + dh11 * h * s.f1[i];
        }
        (y, dy)
    }
}

/// Result of an integration run: the trajectory up to either the requested
/// end or the guard-exit time.
pub struct Integration {
    pub dense: DenseOutput,
    /// Set when the guard tripped; the dense output ends there.
    pub exit: Option<f64>,
}

const RKF_C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const RKF_A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const RKF_B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const RKF_B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -0.2,
    0.0,
];

/// Acceptance margin of the step controller: the embedded estimate bounds
/// the 4th-order error while the 5th-order solution is the one advanced, so
/// steps are accepted only well inside the nominal tolerance.
const CONTROL_MARGIN: f64 = 0.25;

/// Integrates `y' = f(t, y)` from `t0` to `t1` (`t1 > t0`).
///
/// `guard(t, y)` must return `true` while the state is acceptable; `None`
/// disables the check.
pub fn integrate(
    f: &dyn Fn(f64, &[f64]) -> Result<Vec<f64>>,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    guard: Option<&dyn Fn(f64, &[f64]) -> bool>,
) -> Result<Integration> {
    if !(t1 > t0) {
        return Err(Error::Invalid("integration span must be increasing".into()));
    }
    if let Some(g) = guard {
        if !g(t0, y0) {
            return Err(Error::DomainExit { t_exit: t0 });
        }
    }
    match opts.method {
        OdeMethod::Rkf45 => integrate_rkf45(f, t0, y0, t1, opts, guard),
        OdeMethod::Rk4 { step } => integrate_rk4(f, t0, y0, t1, step, guard),
    }
}

fn integrate_rkf45(
    f: &dyn Fn(f64, &[f64]) -> Result<Vec<f64>>,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    guard: Option<&dyn Fn(f64, &[f64]) -> bool>,
) -> Result<Integration> {
    let dim = y0.len();
    let span = t1 - t0;
    let h_min = span * 1e-13;
    let mut h = opts.max_step.min(span / 16.0).max(h_min);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut fy = f(t, &y)?;
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut rejected_in_a_row = 0usize;

    while t < t1 {
        h = h.min(t1 - t).min(opts.max_step);
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(6);
        k.push(fy.clone());
        let mut stage_failed = false;
        for s in 1..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = RKF_A[s][j];
                if a != 0.0 {
                    for i in 0..dim {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            match f(t + RKF_C[s] * h, &ys) {
                Ok(ks) => k.push(ks),
                Err(_) => {
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            h *= 0.5;
            rejected_in_a_row += 1;
            if h < h_min || rejected_in_a_row > 60 {
                // the right-hand side stopped being evaluable: treat as a
                // domain exit when a guard is present
                if guard.is_some() {
                    return finish_with_exit(steps, dim, t, &y, &fy);
                }
                return Err(Error::StepFailure {
                    t,
                    reason: "right-hand side not evaluable and step underflow".into(),
                });
            }
            continue;
        }
        let mut y5 = y.clone();
        let mut y4 = y.clone();
        for (j, kj) in k.iter().enumerate() {
            for i in 0..dim {
                y5[i] += h * RKF_B5[j] * kj[i];
                y4[i] += h * RKF_B4[j] * kj[i];
            }
        }
        let mut err: f64 = 0.0;
        for i in 0..dim {
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / scale).abs());
        }
        err /= CONTROL_MARGIN;
        if err <= 1.0 || h <= h_min {
            let f1 = match f(t + h, &y5) {
                Ok(v) => v,
                Err(_) => {
                    h *= 0.5;
                    if h < h_min {
                        if guard.is_some() {
                            return finish_with_exit(steps, dim, t, &y, &fy);
                        }
                        return Err(Error::StepFailure {
                            t,
                            reason: "endpoint not evaluable".into(),
                        });
                    }
                    continue;
                }
            };
            steps.push(StepRecord {
                t0: t,
                t1: t + h,
                y0: y.clone(),
                f0: fy.clone(),
                y1: y5.clone(),
                f1: f1.clone(),
            });
            t += h;
            y = y5;
            fy = f1;
            rejected_in_a_row = 0;
            if let Some(g) = guard {
                if !g(t, &y) {
                    let dense = DenseOutput { steps, dim };
                    let t_exit = bisect_exit(&dense, g);
                    return Ok(Integration {
                        dense,
                        exit: Some(t_exit),
                    });
                }
            }
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(Error::StepFailure {
                    t,
                    reason: "step size control failed to converge".into(),
                });
            }
        }
        let factor = if err > 0.0 {
            (0.9 * (1.0 / err).powf(0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).max(h_min);
    }
    Ok(Integration {
        dense: DenseOutput { steps, dim },
        exit: None,
    })
}

fn finish_with_exit(
    steps: Vec<StepRecord>,
    dim: usize,
    t: f64,
    _y: &[f64],
    _fy: &[f64],
) -> Result<Integration> {
    if steps.is_empty() {
        return Err(Error::DomainExit { t_exit: t });
    }
    let dense = DenseOutput { steps, dim };
    Ok(Integration {
        dense,
        exit: Some(t),
    })
}

fn integrate_rk4(
    f: &dyn Fn(f64, &[f64]) -> Result<Vec<f64>>,
    t0: f64,
    y0: &[f64],
    t1: f64,
    step: f64,
    guard: Option<&dyn Fn(f64, &[f64]) -> bool>,
) -> Result<Integration> {
    if !(step > 0.0) {
        return Err(Error::Invalid("rk4 step must be positive".into()));
    }
    let dim = y0.len();
    let n = ((t1 - t0) / step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut fy = f(t, &y)?;
    let mut steps = Vec::with_capacity(n);
    for _ in 0..n {
        let k1 = fy.clone();
        let mut y2 = y.clone();
        for i in 0..dim {
            y2[i] += 0.5 * h * k1[i];
        }
        let k2 = f(t + 0.5 * h, &y2)?;
        let mut y3 = y.clone();
        for i in 0..dim {
            y3[i] += 0.5 * h * k2[i];
        }
        let k3 = f(t + 0.5 * h, &y3)?;
        let mut y4 = y.clone();
        for i in 0..dim {
            y4[i] += h * k3[i];
        }
        let k4 = f(t + h, &y4)?;
        let mut y1 = y.clone();
        for i in 0..dim {
            y1[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let f1 = f(t + h, &y1)?;
        steps.push(StepRecord {
            t0: t,
            t1: t + h,
            y0: y.clone(),
            f0: fy.clone(),
            y1: y1.clone(),
            f1: f1.clone(),
        });
        t += h;
        y = y1;
        fy = f1;
        if let Some(g) = guard {
            if !g(t, &y) {
                let dense = DenseOutput { steps, dim };
                let t_exit = bisect_exit(&dense, g);
                return Ok(Integration {
                    dense,
                    exit: Some(t_exit),
                });
            }
        }
    }
    Ok(Integration {
        dense: DenseOutput { steps, dim },
        exit: None,
    })
}

/// Refines the guard-exit instant inside the last step to 1e-9 in t.
fn bisect_exit(dense: &DenseOutput, guard: &dyn Fn(f64, &[f64]) -> bool) -> f64 {
    let last = dense.steps.last().unwrap();
    let mut lo = last.t0;
    let mut hi = last.t1;
    // the state at lo passed the guard when the step was accepted
    for _ in 0..64 {
        if hi - lo <= 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if guard(mid, &dense.eval(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
