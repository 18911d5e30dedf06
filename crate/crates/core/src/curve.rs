//! L-admissible piecewise-smooth curves and vector fields along them.
//!
//! A curve is a list of smooth segments joined continuously at break
//! instants; velocities may jump at breaks, so evaluations at a break carry
//! an explicit [`Side`]. Smooth segments are backed either by a not-a-knot
//! cubic spline through samples or by integrator dense output (geodesics).
//!
//! Time jets of a spline segment come from the spline coefficients. Time
//! jets of a dense segment use the stored state for orders 0–1 and the spray
//! (via the geodesic equation) for orders 2–3, which keeps them accurate to
//! integrator tolerance instead of interpolation error.

use std::sync::Arc;

use crate::connection;
use crate::error::{Error, Result};
use crate::jets::{Jet, JetShape};
use crate::metric::MetricDefinition;
use crate::ode::DenseOutput;
use crate::spline::CubicSpline;

/// Which one-sided limit to take at a break instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Default sample density for closure-backed curves and fields.
pub const SAMPLES_PER_UNIT: usize = 256;

enum SegmentRep {
    Spline(CubicSpline),
    Dense { dense: Arc<DenseOutput>, dim: usize },
}

struct Segment {
    span: [f64; 2],
    rep: SegmentRep,
}

/// A piecewise-smooth curve on the chart.
pub struct PiecewiseCurve {
    segments: Vec<Segment>,
    dim: usize,
}

impl PiecewiseCurve {
    /// Single smooth segment through the samples.
    pub fn from_samples(ts: &[f64], points: &[Vec<f64>]) -> Result<PiecewiseCurve> {
        let spline = CubicSpline::fit(ts, points)?;
        let dim = spline.dim();
        Ok(PiecewiseCurve {
            segments: vec![Segment {
                span: spline.span(),
                rep: SegmentRep::Spline(spline),
            }],
            dim,
        })
    }

    /// Piecewise curve from per-segment samples; adjacent segments must agree
    /// at the junction to 1e-9 (curves are continuous, velocities may jump).
    pub fn from_segment_samples(parts: &[(Vec<f64>, Vec<Vec<f64>>)]) -> Result<PiecewiseCurve> {
        if parts.is_empty() {
            return Err(Error::Invalid("curve needs at least one segment".into()));
        }
        let mut segments = Vec::with_capacity(parts.len());
        for (ts, ys) in parts {
            let spline = CubicSpline::fit(ts, ys)?;
            segments.push(Segment {
                span: spline.span(),
                rep: SegmentRep::Spline(spline),
            });
        }
        let dim = match &segments[0].rep {
            SegmentRep::Spline(s) => s.dim(),
            SegmentRep::Dense { dim, .. } => *dim,
        };
        for w in segments.windows(2) {
            if (w[0].span[1] - w[1].span[0]).abs() > 1e-12 {
                return Err(Error::Invalid("curve segments must share break instants".into()));
            }
            let left = eval_segment(&w[0], w[0].span[1]);
            let right = eval_segment(&w[1], w[1].span[0]);
            let gap: f64 = left
                .iter()
                .zip(&right)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if gap > 1e-9 {
                return Err(Error::Invalid(format!(
                    "curve is discontinuous at a break (gap {gap:.3e})"
                )));
            }
        }
        Ok(PiecewiseCurve { segments, dim })
    }

    /// Samples a closure on `[span[0], span[1]]` into one smooth segment.
    pub fn from_closure(
        span: [f64; 2],
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<PiecewiseCurve> {
        let ts = sample_grid(span, None);
        let ys: Vec<Vec<f64>> = ts.iter().map(|&t| f(t)).collect();
        PiecewiseCurve::from_samples(&ts, &ys)
    }

    /// Samples a closure per smooth piece between the given interior breaks.
    pub fn from_closure_with_breaks(
        span: [f64; 2],
        breaks: &[f64],
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<PiecewiseCurve> {
        let mut parts = Vec::new();
        let mut edges = vec![span[0]];
        edges.extend_from_slice(breaks);
        edges.push(span[1]);
        for w in edges.windows(2) {
            let ts = sample_grid([w[0], w[1]], None);
            let ys: Vec<Vec<f64>> = ts.iter().map(|&t| f(t)).collect();
            parts.push((ts, ys));
        }
        PiecewiseCurve::from_segment_samples(&parts)
    }

    pub(crate) fn from_dense(dense: Arc<DenseOutput>, dim: usize) -> PiecewiseCurve {
        let span = dense.span();
        PiecewiseCurve {
            segments: vec![Segment {
                span,
                rep: SegmentRep::Dense { dense, dim },
            }],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn span(&self) -> [f64; 2] {
        [
            self.segments[0].span[0],
            self.segments.last().unwrap().span[1],
        ]
    }

    /// Interior break instants.
    pub fn breaks(&self) -> Vec<f64> {
        self.segments
            .iter()
            .skip(1)
            .map(|s| s.span[0])
            .collect()
    }

    fn locate(&self, t: f64, side: Option<Side>) -> Result<&Segment> {
        let span = self.span();
        if t < span[0] - 1e-9 || t > span[1] + 1e-9 {
            return Err(Error::Invalid(format!(
                "t = {t} outside the curve span [{}, {}]",
                span[0], span[1]
            )));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            let interior_left = i > 0;
            let interior_right = i + 1 < self.segments.len();
            if interior_left && (t - seg.span[0]).abs() < 1e-12 {
                return match side {
                    Some(Side::Right) => Ok(seg),
                    Some(Side::Left) => Ok(&self.segments[i - 1]),
                    None => Err(Error::BreakAmbiguity { t }),
                };
            }
            if t >= seg.span[0] && (t < seg.span[1] || !interior_right) {
                if interior_right && (t - seg.span[1]).abs() < 1e-12 {
                    return match side {
                        Some(Side::Left) => Ok(seg),
                        Some(Side::Right) => Ok(&self.segments[i + 1]),
                        None => Err(Error::BreakAmbiguity { t }),
                    };
                }
                return Ok(seg);
            }
        }
        Ok(self.segments.last().unwrap())
    }

    pub fn position(&self, t: f64, side: Option<Side>) -> Result<Vec<f64>> {
        Ok(eval_segment(self.locate(t, side)?, t))
    }

    pub fn velocity(&self, t: f64, side: Option<Side>) -> Result<Vec<f64>> {
        let seg = self.locate(t, side)?;
        Ok(match &seg.rep {
            SegmentRep::Spline(s) => s.eval_derivative(t, 1),
            SegmentRep::Dense { dense, dim } => dense.eval(t)[*dim..].to_vec(),
        })
    }

    /// Position components as jets in one `t` direction.
    pub fn position_jets(
        &self,
        m: &MetricDefinition,
        t: f64,
        order: usize,
        side: Option<Side>,
    ) -> Result<Vec<Jet>> {
        let seg = self.locate(t, side)?;
        segment_jets(seg, m, t, order)
    }

    /// Velocity components as jets in one `t` direction (`order ≤ 2`).
    pub fn velocity_jets(
        &self,
        m: &MetricDefinition,
        t: f64,
        order: usize,
        side: Option<Side>,
    ) -> Result<Vec<Jet>> {
        let pos = self.position_jets(m, t, order + 1, side)?;
        differentiate_jets(&pos, order)
    }

    /// Checks admissibility of the velocity at the given instants (both
    /// sides at breaks).
    pub fn check_admissible_at(&self, m: &MetricDefinition, ts: &[f64]) -> Result<()> {
        for &t in ts {
            let side = Some(Side::Right);
            let x = self.position(t, side)?;
            let v = self.velocity(t, side)?;
            m.check_admissible(&x, &v, Some(t))?;
        }
        for &t in &self.breaks() {
            let x = self.position(t, Some(Side::Left))?;
            let v = self.velocity(t, Some(Side::Left))?;
            m.check_admissible(&x, &v, Some(t))?;
        }
        Ok(())
    }

    /// Knot edges of every smooth segment, for quadrature panels.
    pub fn quadrature_panels(&self) -> Vec<Vec<f64>> {
        self.segments
            .iter()
            .map(|seg| match &seg.rep {
                SegmentRep::Spline(s) => s.knots().to_vec(),
                SegmentRep::Dense { dense, .. } => dense.step_times(),
            })
            .collect()
    }
}

fn eval_segment(seg: &Segment, t: f64) -> Vec<f64> {
    match &seg.rep {
        SegmentRep::Spline(s) => s.eval(t),
        SegmentRep::Dense { dense, dim } => dense.eval(t)[..*dim].to_vec(),
    }
}

fn segment_jets(seg: &Segment, m: &MetricDefinition, t: f64, order: usize) -> Result<Vec<Jet>> {
    match &seg.rep {
        SegmentRep::Spline(s) => s.eval_jet(t, order),
        SegmentRep::Dense { dense, dim } => {
            let n = *dim;
            let state = dense.eval(t);
            let x = &state[..n];
            let v = &state[n..];
            let shape = JetShape::get(1, order)?;
            let mut jets: Vec<Jet> = x.iter().map(|&c| Jet::constant(shape, c)).collect();
            if order >= 1 {
                for (j, &c) in jets.iter_mut().zip(v.iter()) {
                    j.set_coeff(&[1], c);
                }
            }
            if order >= 2 {
                let spray = connection::spray_s(m, x, v)?;
                let acc: Vec<f64> = spray.iter().map(|g| -2.0 * g).collect();
                for (j, &a) in jets.iter_mut().zip(acc.iter()) {
                    j.set_coeff(&[2], a / 2.0);
                }
                if order >= 3 {
                    // jerk from differentiating the spray along the curve
                    let s1 = JetShape::get(1, 1)?;
                    let xj: Vec<Jet> = x
                        .iter()
                        .zip(v.iter())
                        .map(|(&xc, &vc)| {
                            let mut j = Jet::constant(s1, xc);
                            j.set_coeff(&[1], vc);
                            j
                        })
                        .collect();
                    let vj: Vec<Jet> = v
                        .iter()
                        .zip(acc.iter())
                        .map(|(&vc, &ac)| {
                            let mut j = Jet::constant(s1, vc);
                            j.set_coeff(&[1], ac);
                            j
                        })
                        .collect();
                    let gj = connection::spray_s(m, &xj, &vj)?;
                    for (j, g) in jets.iter_mut().zip(gj.iter()) {
                        let jerk = -2.0 * g.coeff(&[1]);
                        j.set_coeff(&[3], jerk / 6.0);
                    }
                }
            }
            Ok(jets)
        }
    }
}

/// Shifts jet coefficients to produce the derivative jet of one order lower
/// headroom: `out_k = (k+1)·in_{k+1}` kept to `order`.
pub(crate) fn differentiate_jets(jets: &[Jet], order: usize) -> Result<Vec<Jet>> {
    let shape = JetShape::get(1, order)?;
    jets.iter()
        .map(|j| {
            let mut out = Jet::constant(shape, j.coeff(&[1]));
            for k in 1..=order {
                out.set_coeff(&[k], (k as f64 + 1.0) * j.coeff(&[k + 1]));
            }
            Ok(out)
        })
        .collect()
}

struct FieldSegment {
    span: [f64; 2],
    spline: CubicSpline,
}

/// A piecewise-smooth vector field along a curve, sharing its breaks.
pub struct VectorFieldAlongCurve {
    segments: Vec<FieldSegment>,
    dim: usize,
}

impl VectorFieldAlongCurve {
    /// Samples a closure along the curve, segment by segment.
    pub fn from_closure(
        curve: &PiecewiseCurve,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<VectorFieldAlongCurve> {
        let mut segments = Vec::new();
        for seg in &curve.segments {
            let ts = sample_grid(seg.span, None);
            let ys: Vec<Vec<f64>> = ts.iter().map(|&t| f(t)).collect();
            let spline = CubicSpline::fit(&ts, &ys)?;
            segments.push(FieldSegment {
                span: seg.span,
                spline,
            });
        }
        let dim = segments[0].spline.dim();
        Ok(VectorFieldAlongCurve { segments, dim })
    }

    /// One-sided closures: `f(t, side)` is sampled with the side of the
    /// segment the sample belongs to, so fields may jump at breaks.
    pub fn from_sided_closure(
        curve: &PiecewiseCurve,
        f: impl Fn(f64, Side) -> Vec<f64>,
    ) -> Result<VectorFieldAlongCurve> {
        let mut segments = Vec::new();
        for seg in &curve.segments {
            let ts = sample_grid(seg.span, None);
            let ys: Vec<Vec<f64>> = ts
                .iter()
                .map(|&t| {
                    if (t - seg.span[0]).abs() < 1e-12 {
                        f(t, Side::Right)
                    } else {
                        f(t, Side::Left)
                    }
                })
                .collect();
            let spline = CubicSpline::fit(&ts, &ys)?;
            segments.push(FieldSegment {
                span: seg.span,
                spline,
            });
        }
        let dim = segments[0].spline.dim();
        Ok(VectorFieldAlongCurve { segments, dim })
    }

    pub fn constant(curve: &PiecewiseCurve, w: &[f64]) -> Result<VectorFieldAlongCurve> {
        let w = w.to_vec();
        VectorFieldAlongCurve::from_closure(curve, move |_| w.clone())
    }

    /// Builds from explicit per-segment samples.
    pub fn from_segment_samples(
        parts: &[(Vec<f64>, Vec<Vec<f64>>)],
    ) -> Result<VectorFieldAlongCurve> {
        let mut segments = Vec::new();
        for (ts, ys) in parts {
            let spline = CubicSpline::fit(ts, ys)?;
            segments.push(FieldSegment {
                span: spline.span(),
                spline,
            });
        }
        if segments.is_empty() {
            return Err(Error::Invalid("field needs at least one segment".into()));
        }
        let dim = segments[0].spline.dim();
        Ok(VectorFieldAlongCurve { segments, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn span(&self) -> [f64; 2] {
        [
            self.segments[0].span[0],
            self.segments.last().unwrap().span[1],
        ]
    }

    pub fn breaks(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.span[0]).collect()
    }

    /// True when the field's breaks coincide with the curve's.
    pub fn shares_breaks_with(&self, curve: &PiecewiseCurve) -> bool {
        let mine = self.breaks();
        let theirs = curve.breaks();
        mine.len() == theirs.len()
            && mine
                .iter()
                .zip(&theirs)
                .all(|(a, b)| (a - b).abs() < 1e-12)
            && {
                let s = self.span();
                let c = curve.span();
                (s[0] - c[0]).abs() < 1e-12 && (s[1] - c[1]).abs() < 1e-12
            }
    }

    fn locate(&self, t: f64, side: Option<Side>) -> Result<&FieldSegment> {
        let span = self.span();
        if t < span[0] - 1e-9 || t > span[1] + 1e-9 {
            return Err(Error::Invalid(format!(
                "t = {t} outside the field span [{}, {}]",
                span[0], span[1]
            )));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            let interior_left = i > 0;
            let interior_right = i + 1 < self.segments.len();
            if interior_left && (t - seg.span[0]).abs() < 1e-12 {
                return match side {
                    Some(Side::Right) => Ok(seg),
                    Some(Side::Left) => Ok(&self.segments[i - 1]),
                    None => Err(Error::BreakAmbiguity { t }),
                };
            }
            if t >= seg.span[0] && (t < seg.span[1] || !interior_right) {
                if interior_right && (t - seg.span[1]).abs() < 1e-12 {
                    return match side {
                        Some(Side::Left) => Ok(seg),
                        Some(Side::Right) => Ok(&self.segments[i + 1]),
                        None => Err(Error::BreakAmbiguity { t }),
                    };
                }
                return Ok(seg);
            }
        }
        Ok(self.segments.last().unwrap())
    }

    pub fn value(&self, t: f64, side: Option<Side>) -> Result<Vec<f64>> {
        Ok(self.locate(t, side)?.spline.eval(t))
    }

    pub fn derivative(&self, t: f64, order: usize, side: Option<Side>) -> Result<Vec<f64>> {
        Ok(self.locate(t, side)?.spline.eval_derivative(t, order))
    }

    /// Components as jets in one `t` direction.
    pub fn jets(&self, t: f64, order: usize, side: Option<Side>) -> Result<Vec<Jet>> {
        self.locate(t, side)?.spline.eval_jet(t, order)
    }
}

fn sample_grid(span: [f64; 2], samples: Option<usize>) -> Vec<f64> {
    let len = (span[1] - span[0]).abs();
    let n = samples
        .unwrap_or_else(|| ((len * SAMPLES_PER_UNIT as f64).ceil() as usize).clamp(16, 4096));
    (0..=n)
        .map(|i| span[0] + (span[1] - span[0]) * i as f64 / n as f64)
        .collect()
}
