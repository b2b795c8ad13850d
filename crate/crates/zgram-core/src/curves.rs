//! Parameter-space curves and discriminant traces along them.
//!
//! A curve runs from the reference shift towards (usually) the full
//! convergent expansion at `a = 1`. Tracing the discriminant along it shows
//! whether the tracked extremum ever crosses zero on the way; the split
//! curve lets a handful of hand-picked coefficients run ahead of the rest,
//! which is how a sign crossing on the straight path is steered around.

use crate::discriminant::{
    continue_segment, extend_gram_point, tracking_window, ContinuationOptions,
};
use crate::error::{Error, Result};
use crate::gram::{gram_point, parity};
use crate::section::{term_table, z_section, ParameterVector, SectionContext};

/// Default samples per curve segment.
pub const DEFAULT_GRID: usize = 64;

/// A path `s -> a(s)` through parameter space, `s` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveSpec {
    /// `a_k(s) = s` for every k: straight from 0 to the full expansion.
    Linear {
        /// Samples per segment.
        grid: usize,
    },
    /// Two rates: the shift indices follow `r1`, everything else `r2`, with
    /// `(r1, r2)` walking a polyline from `(0, 0)` to `(1, 1)`.
    Split {
        /// 1-based coefficient indices on the fast rate, strictly increasing.
        shift: Vec<usize>,
        /// `(r1, r2)` waypoints; first `(0, 0)`, last `(1, 1)`.
        waypoints: Vec<(f64, f64)>,
        /// Samples per segment.
        grid: usize,
    },
    /// Componentwise-linear interpolation through explicit shift vectors.
    Piecewise {
        /// At least two vectors of equal length.
        waypoints: Vec<ParameterVector>,
        /// Samples per segment.
        grid: usize,
    },
}

impl CurveSpec {
    /// The straight curve at the default grid.
    pub fn linear() -> Self {
        CurveSpec::Linear { grid: DEFAULT_GRID }
    }

    /// A split curve at the default grid.
    pub fn split(shift: Vec<usize>, waypoints: Vec<(f64, f64)>) -> Self {
        CurveSpec::Split {
            shift,
            waypoints,
            grid: DEFAULT_GRID,
        }
    }

    /// Same curve, different sampling density.
    pub fn with_grid(mut self, grid: usize) -> Self {
        match &mut self {
            CurveSpec::Linear { grid: g }
            | CurveSpec::Split { grid: g, .. }
            | CurveSpec::Piecewise { grid: g, .. } => *g = grid,
        }
        self
    }

    /// Samples per segment.
    pub fn grid(&self) -> usize {
        match self {
            CurveSpec::Linear { grid }
            | CurveSpec::Split { grid, .. }
            | CurveSpec::Piecewise { grid, .. } => *grid,
        }
    }

    /// Number of linear segments.
    pub fn segments(&self) -> usize {
        match self {
            CurveSpec::Linear { .. } => 1,
            CurveSpec::Split { waypoints, .. } => waypoints.len() - 1,
            CurveSpec::Piecewise { waypoints, .. } => waypoints.len() - 1,
        }
    }

    /// Checks the spec against a coefficient count.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.grid() < 2 {
            return Err(Error::BadCurve("grid must be at least 2".into()));
        }
        match self {
            CurveSpec::Linear { .. } => Ok(()),
            CurveSpec::Split {
                shift, waypoints, ..
            } => {
                if waypoints.len() < 2 {
                    return Err(Error::BadCurve("need at least two waypoints".into()));
                }
                if waypoints[0] != (0.0, 0.0) {
                    return Err(Error::BadCurve(
                        "split curve must start at (0, 0)".into(),
                    ));
                }
                if *waypoints.last().unwrap() != (1.0, 1.0) {
                    return Err(Error::BadCurve("split curve must end at (1, 1)".into()));
                }
                for &(r1, r2) in waypoints {
                    if !r1.is_finite() || !r2.is_finite() {
                        return Err(Error::BadCurve("non-finite waypoint".into()));
                    }
                }
                if shift.is_empty() {
                    return Err(Error::BadCurve("empty shift set".into()));
                }
                let mut prev = 0usize;
                for &k in shift {
                    if k == 0 || k > len {
                        return Err(Error::CoefficientIndex { index: k, len });
                    }
                    if k <= prev {
                        return Err(Error::BadCurve(
                            "shift indices must be strictly increasing".into(),
                        ));
                    }
                    prev = k;
                }
                Ok(())
            }
            CurveSpec::Piecewise { waypoints, .. } => {
                if waypoints.len() < 2 {
                    return Err(Error::BadCurve("need at least two waypoints".into()));
                }
                for w in waypoints {
                    w.validate()?;
                    if w.len() != len {
                        return Err(Error::BlendShape {
                            left: w.len(),
                            right: len,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Short description for reports, e.g.
    /// `split(shift={1,2,4,6,12}; waypoints=(0,0)->(1,0.41)->(1,1))`.
    pub fn describe(&self) -> String {
        match self {
            CurveSpec::Linear { .. } => "linear".to_string(),
            CurveSpec::Split {
                shift, waypoints, ..
            } => {
                let ks: Vec<String> = shift.iter().map(|k| k.to_string()).collect();
                let ws: Vec<String> = waypoints
                    .iter()
                    .map(|(a, b)| format!("({a},{b})"))
                    .collect();
                format!(
                    "split(shift={{{}}}; waypoints={})",
                    ks.join(","),
                    ws.join("->")
                )
            }
            CurveSpec::Piecewise { waypoints, .. } => {
                format!("piecewise[{} waypoints]", waypoints.len())
            }
        }
    }
}

fn segment_of(s: f64, segments: usize) -> (usize, f64) {
    let u = s * segments as f64;
    let i = (u.floor() as usize).min(segments - 1);
    (i, u - i as f64)
}

fn polyline(waypoints: &[(f64, f64)], s: f64) -> (f64, f64) {
    let (i, f) = segment_of(s, waypoints.len() - 1);
    let (a1, a2) = waypoints[i];
    let (b1, b2) = waypoints[i + 1];
    (a1 + (b1 - a1) * f, a2 + (b2 - a2) * f)
}

fn eval_unchecked(spec: &CurveSpec, s: f64, len: usize) -> Result<ParameterVector> {
    match spec {
        CurveSpec::Linear { .. } => Ok(ParameterVector::uniform(len, s)),
        CurveSpec::Split {
            shift, waypoints, ..
        } => {
            let (r1, r2) = polyline(waypoints, s);
            let mut a = ParameterVector::uniform(len, r2);
            for &k in shift {
                a = a.with_set(k, r1)?;
            }
            Ok(a)
        }
        CurveSpec::Piecewise { waypoints, .. } => {
            let (i, f) = segment_of(s, waypoints.len() - 1);
            ParameterVector::lerp(&waypoints[i], &waypoints[i + 1], f)
        }
    }
}

/// The shift vector at curve position `s` for a length-`len` section.
pub fn curve_eval(spec: &CurveSpec, s: f64, len: usize) -> Result<ParameterVector> {
    spec.validate(len)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::BadCurve(format!("s = {s} outside [0, 1]")));
    }
    eval_unchecked(spec, s, len)
}

/// One trace sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    /// Curve position in `[0, 1]`.
    pub s: f64,
    /// Fast rate at `s` (equals `s` for non-split curves).
    pub r1: f64,
    /// Slow rate at `s` (equals `s` for non-split curves).
    pub r2: f64,
    /// Tracked extremum location.
    pub t: f64,
    /// Discriminant value.
    pub delta: f64,
    /// `(-1)^n delta`.
    pub signed: f64,
}

/// A discriminant trace along a curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTrace {
    /// Gram index.
    pub n: i64,
    /// Samples in order of `s`; truncated if the continuation failed.
    pub samples: Vec<CurveSample>,
    /// Minimum of `signed` over the computed samples (infinite if none).
    pub min_signed: f64,
    /// Position of the first sample the continuation could not reach.
    pub failed_at: Option<f64>,
}

/// Traces the discriminant along a curve, warm-starting each sample's
/// extremum from the previous one. Continuation failures truncate the trace
/// and are reported in `failed_at` rather than as errors.
pub fn trace_discriminant(n: i64, spec: &CurveSpec) -> Result<CurveTrace> {
    let g = gram_point(n)?;
    let len = SectionContext::spira_terms(g.t);
    spec.validate(len)?;
    let window = tracking_window(n)?;
    let ctx = SectionContext::new(len);
    let sgn = parity(n);
    let sign_req = -sgn;
    let total = spec.segments() * spec.grid();
    let opts = ContinuationOptions {
        initial_steps: 1, // consecutive samples are already close
        ..Default::default()
    };
    let mut samples = Vec::with_capacity(total + 1);
    let mut min_signed = f64::INFINITY;
    let mut failed_at = None;
    let mut prev_a: Option<ParameterVector> = None;
    let mut t = g.t;
    for j in 0..=total {
        let s = j as f64 / total as f64;
        let a = eval_unchecked(spec, s, len)?;
        if let Some(pa) = &prev_a {
            match continue_segment(&ctx, window, pa, &a, t, sign_req, &opts) {
                Ok((tn, _, _)) => t = tn,
                Err(Error::ExtremumLost { .. }) | Err(Error::NoConvergence { .. }) => {
                    failed_at = Some(s);
                    break;
                }
                Err(e) => return Err(e),
            }
        } else if !a.is_zero() {
            // A curve that starts away from the reference shift has to be
            // positioned cold first.
            match extend_gram_point(n, a.clone()) {
                Ok(e) => t = e.t,
                Err(Error::ExtremumLost { .. }) | Err(Error::NoConvergence { .. }) => {
                    failed_at = Some(s);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let delta = z_section(t, &a, &ctx)?;
        let signed = sgn * delta;
        let (r1, r2) = match spec {
            CurveSpec::Split { waypoints, .. } => polyline(waypoints, s),
            _ => (s, s),
        };
        samples.push(CurveSample {
            s,
            r1,
            r2,
            t,
            delta,
            signed,
        });
        if signed < min_signed {
            min_signed = signed;
        }
        prev_a = Some(a);
    }
    Ok(CurveTrace {
        n,
        samples,
        min_signed,
        failed_at,
    })
}

/// Maximal runs of samples with `signed <= 0`, as `(s_first, s_last)` pairs.
pub fn sign_violations(trace: &CurveTrace) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for sample in &trace.samples {
        if sample.signed <= 0.0 {
            open = Some(match open {
                Some((first, _)) => (first, sample.s),
                None => (sample.s, sample.s),
            });
        } else if let Some(run) = open.take() {
            out.push(run);
        }
    }
    if let Some(run) = open {
        out.push(run);
    }
    out
}

/// Ranks table rows by leverage `B_k` (descending, ties to the smaller k)
/// and returns the top `count` indices in ascending order.
pub fn suggest_shift_indices(n: i64, k_max: usize, count: usize) -> Result<Vec<usize>> {
    if count > k_max {
        return Err(Error::BadSelection { count, k_max });
    }
    let rows = term_table(n, k_max)?;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| {
        rows[j]
            .b
            .total_cmp(&rows[i].b)
            .then(rows[i].k.cmp(&rows[j].k))
    });
    let mut picked: Vec<usize> = order[..count].iter().map(|&i| rows[i].k).collect();
    picked.sort_unstable();
    Ok(picked)
}
