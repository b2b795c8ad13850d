//! Z-sections, their t-derivatives, and the two working approximations of Z.
//!
//! A section attaches a shift coefficient `a_k` to the k-th Dirichlet term:
//!
//! ```text
//! Z_N(t; a) = cos(theta(t)) + sum_{k=1}^{N} a_k cos(theta(t) - t ln(k+1)) / sqrt(k+1)
//! ```
//!
//! so `a = 0` is the bare leading section and `a = 1` (with `N = floor(t/2)`)
//! is Spira's convergent expansion. The main-sum approximation with its first
//! correction term (`z_afe`) is what classification uses: it is accurate to a
//! few parts in `t^{3/4}` and costs only `sqrt(t/2pi)` terms.

use crate::error::{Error, Result};
use crate::gram::{gram_point, parity};
use crate::special::{DerivativeForm, ThetaSeries};
use std::f64::consts::{PI, TAU};

/// Coefficient count above which sums switch to compensated accumulation.
const KAHAN_CUTOFF: usize = 100_000;

/// Shift coefficients `a_1..a_N`, stored densely or as a base value plus
/// sparse overrides. The sparse form keeps curve tracing cheap: a scan step
/// touches two base values and a handful of overridden indices instead of
/// cloning a quarter-million floats.
#[derive(Clone, Debug, PartialEq)]
pub enum ParameterVector {
    /// Explicit coefficients; element `i` holds `a_{i+1}`.
    Dense(Vec<f64>),
    /// Every coefficient equals `value` except the listed 1-based overrides.
    Uniform {
        /// Coefficient count N.
        len: usize,
        /// Default value for unlisted indices.
        value: f64,
        /// Sorted, deduplicated `(k, a_k)` pairs with `1 <= k <= len`.
        overrides: Vec<(usize, f64)>,
    },
}

impl ParameterVector {
    /// The all-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self::uniform(len, 0.0)
    }

    /// The all-ones vector of length `len`.
    pub fn ones(len: usize) -> Self {
        Self::uniform(len, 1.0)
    }

    /// Every coefficient set to `value`.
    pub fn uniform(len: usize, value: f64) -> Self {
        ParameterVector::Uniform {
            len,
            value,
            overrides: Vec::new(),
        }
    }

    /// Wraps explicit coefficients.
    pub fn from_dense(values: Vec<f64>) -> Self {
        ParameterVector::Dense(values)
    }

    /// Returns the vector with `a_k = value` (1-based `k`).
    pub fn with_set(mut self, k: usize, value: f64) -> Result<Self> {
        let len = self.len();
        if k == 0 || k > len {
            return Err(Error::CoefficientIndex { index: k, len });
        }
        match &mut self {
            ParameterVector::Dense(v) => v[k - 1] = value,
            ParameterVector::Uniform { overrides, .. } => {
                match overrides.binary_search_by_key(&k, |&(i, _)| i) {
                    Ok(pos) => overrides[pos].1 = value,
                    Err(pos) => overrides.insert(pos, (k, value)),
                }
            }
        }
        Ok(self)
    }

    /// Coefficient count N.
    pub fn len(&self) -> usize {
        match self {
            ParameterVector::Dense(v) => v.len(),
            ParameterVector::Uniform { len, .. } => *len,
        }
    }

    /// True for a zero-length vector.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `a_k` for 1-based `k`; panics if `k` is out of range.
    pub fn coefficient(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.len(), "coefficient index {k} out of range");
        match self {
            ParameterVector::Dense(v) => v[k - 1],
            ParameterVector::Uniform {
                value, overrides, ..
            } => overrides
                .binary_search_by_key(&k, |&(i, _)| i)
                .map(|pos| overrides[pos].1)
                .unwrap_or(*value),
        }
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        match self {
            ParameterVector::Dense(v) => v.iter().all(|&x| x == 0.0),
            ParameterVector::Uniform {
                value, overrides, ..
            } => *value == 0.0 && overrides.iter().all(|&(_, v)| v == 0.0),
        }
    }

    /// Checks that every coefficient is finite and overrides are in range,
    /// sorted and unique.
    pub fn validate(&self) -> Result<()> {
        match self {
            ParameterVector::Dense(v) => {
                for (i, &x) in v.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::NonFiniteCoefficient(i + 1));
                    }
                }
            }
            ParameterVector::Uniform {
                len,
                value,
                overrides,
            } => {
                if !value.is_finite() {
                    return Err(Error::NonFiniteCoefficient(0));
                }
                let mut prev = 0usize;
                for &(k, v) in overrides {
                    if k == 0 || k > *len {
                        return Err(Error::CoefficientIndex {
                            index: k,
                            len: *len,
                        });
                    }
                    if k <= prev {
                        return Err(Error::CoefficientIndex {
                            index: k,
                            len: *len,
                        });
                    }
                    if !v.is_finite() {
                        return Err(Error::NonFiniteCoefficient(k));
                    }
                    prev = k;
                }
            }
        }
        Ok(())
    }

    /// Expands to explicit coefficients.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            ParameterVector::Dense(v) => v.clone(),
            ParameterVector::Uniform {
                len,
                value,
                overrides,
            } => {
                let mut out = vec![*value; *len];
                for &(k, v) in overrides {
                    out[k - 1] = v;
                }
                out
            }
        }
    }

    /// `sum_k a_k w[k-1]`; `w` must have exactly N entries.
    pub fn dot(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.len(), "weight vector length mismatch");
        match self {
            ParameterVector::Dense(v) => v.iter().zip(w).map(|(a, b)| a * b).sum(),
            ParameterVector::Uniform {
                value, overrides, ..
            } => {
                let mut s = if *value != 0.0 {
                    value * w.iter().sum::<f64>()
                } else {
                    0.0
                };
                for &(k, v) in overrides {
                    s += (v - value) * w[k - 1];
                }
                s
            }
        }
    }

    /// Componentwise `a + (b - a) s`, exact at the endpoints. Two uniform
    /// vectors blend sparsely (override keys are unioned); mixed shapes fall
    /// back to dense.
    pub fn lerp(a: &Self, b: &Self, s: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::BlendShape {
                left: a.len(),
                right: b.len(),
            });
        }
        if s == 0.0 {
            return Ok(a.clone());
        }
        if s == 1.0 {
            return Ok(b.clone());
        }
        match (a, b) {
            (
                ParameterVector::Uniform {
                    len,
                    value: va,
                    overrides: oa,
                },
                ParameterVector::Uniform {
                    value: vb,
                    overrides: ob,
                    ..
                },
            ) => {
                let mut keys: Vec<usize> =
                    oa.iter().chain(ob.iter()).map(|&(k, _)| k).collect();
                keys.sort_unstable();
                keys.dedup();
                let lookup = |o: &[(usize, f64)], k: usize, base: f64| {
                    o.binary_search_by_key(&k, |&(i, _)| i)
                        .map(|pos| o[pos].1)
                        .unwrap_or(base)
                };
                let overrides = keys
                    .into_iter()
                    .map(|k| {
                        let av = lookup(oa, k, *va);
                        let bv = lookup(ob, k, *vb);
                        (k, av + (bv - av) * s)
                    })
                    .collect();
                Ok(ParameterVector::Uniform {
                    len: *len,
                    value: va + (vb - va) * s,
                    overrides,
                })
            }
            _ => {
                let av = a.to_dense();
                let bv = b.to_dense();
                Ok(ParameterVector::Dense(
                    av.iter()
                        .zip(&bv)
                        .map(|(&x, &y)| x + (y - x) * s)
                        .collect(),
                ))
            }
        }
    }

    /// Compact human/machine-readable description, e.g. `ones[141]` or
    /// `uniform[141]=0.41+{1=1,2=1}`.
    pub fn describe(&self) -> String {
        match self {
            ParameterVector::Dense(v) => format!("dense[{}]", v.len()),
            ParameterVector::Uniform {
                len,
                value,
                overrides,
            } => {
                let base = if *value == 0.0 {
                    format!("zeros[{len}]")
                } else if *value == 1.0 {
                    format!("ones[{len}]")
                } else {
                    format!("uniform[{len}]={value}")
                };
                if overrides.is_empty() {
                    base
                } else {
                    let parts: Vec<String> = overrides
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect();
                    format!("{base}+{{{}}}", parts.join(","))
                }
            }
        }
    }
}

/// Precomputed `ln(k+1)` and `1/sqrt(k+1)` tables shared across evaluations
/// at a common truncation length.
#[derive(Clone, Debug)]
pub struct SectionContext {
    logs: Vec<f64>,
    inv_sqrts: Vec<f64>,
}

impl SectionContext {
    /// Tables for terms `k = 1..=terms`.
    pub fn new(terms: usize) -> Self {
        let mut logs = Vec::with_capacity(terms);
        let mut inv_sqrts = Vec::with_capacity(terms);
        for k in 1..=terms {
            let m = (k + 1) as f64;
            logs.push(m.ln());
            inv_sqrts.push(1.0 / m.sqrt());
        }
        SectionContext { logs, inv_sqrts }
    }

    /// Context sized for the convergent expansion at height `t`.
    pub fn for_height(t: f64) -> Self {
        Self::new(Self::spira_terms(t))
    }

    /// Term count of the convergent expansion: `floor(t/2)`.
    pub fn spira_terms(t: f64) -> usize {
        (t / 2.0).floor() as usize
    }

    /// Term count of the main-sum approximation: `floor(sqrt(t/2pi))`.
    pub fn afe_terms(t: f64) -> usize {
        (t / TAU).sqrt().floor() as usize
    }

    /// Number of tabulated terms.
    pub fn len(&self) -> usize {
        self.logs.len()
    }

    /// True when no terms are tabulated.
    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }
}

/// A section value with its first two t-derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionValues {
    /// `Z_N(t; a)`.
    pub z: f64,
    /// `d/dt Z_N(t; a)`.
    pub dz: f64,
    /// `d^2/dt^2 Z_N(t; a)`.
    pub ddz: f64,
}

trait Acc: Default {
    fn add(&mut self, x: f64);
    fn value(&self) -> f64;
}

#[derive(Default, Clone, Copy)]
struct Plain(f64);

impl Acc for Plain {
    #[inline]
    fn add(&mut self, x: f64) {
        self.0 += x;
    }
    fn value(&self) -> f64 {
        self.0
    }
}

/// Compensated accumulator (Kahan–Babuška / Neumaier); recovers the
/// low-order bits a plain sum sheds once the term count runs into the
/// hundreds of thousands, and survives heavy cancellation.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Acc for Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.c += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Default, Clone, Copy)]
struct RawSums {
    /// `sum w_k cos(ph_k)` with `w_k = a_k / sqrt(k+1)`.
    sc: f64,
    /// `sum w_k d_k sin(ph_k)` with `d_k = theta' - ln(k+1)`.
    sds: f64,
    /// `sum w_k d_k^2 cos(ph_k)`.
    sddc: f64,
    /// `sum w_k sin(ph_k)`.
    ss: f64,
}

fn accumulate<A: Acc>(
    ctx: &SectionContext,
    len: usize,
    t: f64,
    th: f64,
    tp: f64,
    coeff: impl Fn(usize) -> f64,
) -> RawSums {
    let mut sc = A::default();
    let mut sds = A::default();
    let mut sddc = A::default();
    let mut ss = A::default();
    for i in 0..len {
        let a = coeff(i);
        if a == 0.0 {
            continue;
        }
        let w = a * ctx.inv_sqrts[i];
        let lk = ctx.logs[i];
        let (sn, cs) = (th - lk * t).sin_cos();
        let d = tp - lk;
        sc.add(w * cs);
        sds.add(w * d * sn);
        sddc.add(w * d * d * cs);
        ss.add(w * sn);
    }
    RawSums {
        sc: sc.value(),
        sds: sds.value(),
        sddc: sddc.value(),
        ss: ss.value(),
    }
}

fn accumulate_cos<A: Acc>(
    ctx: &SectionContext,
    len: usize,
    t: f64,
    th: f64,
    coeff: impl Fn(usize) -> f64,
) -> f64 {
    let mut sc = A::default();
    for i in 0..len {
        let a = coeff(i);
        if a == 0.0 {
            continue;
        }
        sc.add(a * ctx.inv_sqrts[i] * (th - ctx.logs[i] * t).cos());
    }
    sc.value()
}

fn check_pair(a: &ParameterVector, ctx: &SectionContext) -> Result<()> {
    a.validate()?;
    if a.len() > ctx.len() {
        return Err(Error::LengthMismatch {
            got: a.len(),
            cap: ctx.len(),
        });
    }
    Ok(())
}

fn full_sums(a: &ParameterVector, ctx: &SectionContext, t: f64, th: f64, tp: f64) -> RawSums {
    let big = a.len() > KAHAN_CUTOFF;
    match a {
        ParameterVector::Dense(v) => {
            if big {
                accumulate::<Compensated>(ctx, v.len(), t, th, tp, |i| v[i])
            } else {
                accumulate::<Plain>(ctx, v.len(), t, th, tp, |i| v[i])
            }
        }
        ParameterVector::Uniform {
            len,
            value,
            overrides,
        } => {
            let mut s = if *value != 0.0 {
                if big {
                    accumulate::<Compensated>(ctx, *len, t, th, tp, |_| *value)
                } else {
                    accumulate::<Plain>(ctx, *len, t, th, tp, |_| *value)
                }
            } else {
                RawSums::default()
            };
            for &(k, v) in overrides {
                let dv = v - value;
                if dv == 0.0 {
                    continue;
                }
                let i = k - 1;
                let w = dv * ctx.inv_sqrts[i];
                let lk = ctx.logs[i];
                let (sn, cs) = (th - lk * t).sin_cos();
                let d = tp - lk;
                s.sc += w * cs;
                s.sds += w * d * sn;
                s.sddc += w * d * d * cs;
                s.ss += w * sn;
            }
            s
        }
    }
}

fn cos_sum(a: &ParameterVector, ctx: &SectionContext, t: f64, th: f64) -> f64 {
    let big = a.len() > KAHAN_CUTOFF;
    match a {
        ParameterVector::Dense(v) => {
            if big {
                accumulate_cos::<Compensated>(ctx, v.len(), t, th, |i| v[i])
            } else {
                accumulate_cos::<Plain>(ctx, v.len(), t, th, |i| v[i])
            }
        }
        ParameterVector::Uniform {
            len,
            value,
            overrides,
        } => {
            let mut s = if *value != 0.0 {
                if big {
                    accumulate_cos::<Compensated>(ctx, *len, t, th, |_| *value)
                } else {
                    accumulate_cos::<Plain>(ctx, *len, t, th, |_| *value)
                }
            } else {
                0.0
            };
            for &(k, v) in overrides {
                let dv = v - value;
                if dv == 0.0 {
                    continue;
                }
                let i = k - 1;
                s += dv * ctx.inv_sqrts[i] * (th - ctx.logs[i] * t).cos();
            }
            s
        }
    }
}

/// `Z_N(t; a)` with `N = a.len()`.
pub fn z_section(t: f64, a: &ParameterVector, ctx: &SectionContext) -> Result<f64> {
    check_pair(a, ctx)?;
    let th = crate::special::theta(t)?;
    Ok(th.cos() + cos_sum(a, ctx, t, th))
}

/// `Z_N` together with its first two t-derivatives in one pass.
pub fn z_section_full(
    t: f64,
    a: &ParameterVector,
    ctx: &SectionContext,
    form: DerivativeForm,
) -> Result<SectionValues> {
    check_pair(a, ctx)?;
    let series = ThetaSeries::default();
    let th = series.theta(t)?;
    let tp = series.theta_prime(t, form)?;
    let ts = series.theta_second(t, form)?;
    let s = full_sums(a, ctx, t, th, tp);
    Ok(SectionValues {
        z: th.cos() + s.sc,
        dz: -th.sin() * tp - s.sds,
        ddz: -th.cos() * tp * tp - th.sin() * ts - s.sddc - s.ss * ts,
    })
}

/// `d/dt Z_N(t; a)`.
pub fn z_section_dt(
    t: f64,
    a: &ParameterVector,
    ctx: &SectionContext,
    form: DerivativeForm,
) -> Result<f64> {
    Ok(z_section_full(t, a, ctx, form)?.dz)
}

/// `d^2/dt^2 Z_N(t; a)`.
pub fn z_section_dtt(
    t: f64,
    a: &ParameterVector,
    ctx: &SectionContext,
    form: DerivativeForm,
) -> Result<f64> {
    Ok(z_section_full(t, a, ctx, form)?.ddz)
}

/// The convergent expansion `Z_N(t; 1)` with `N = floor(t/2)`.
pub fn z_spira(t: f64) -> Result<f64> {
    let th = crate::special::theta(t)?;
    let n = SectionContext::spira_terms(t);
    let mut s = 0.0;
    for m in 2..=(n + 1) {
        let mf = m as f64;
        s += (th - mf.ln() * t).cos() / mf.sqrt();
    }
    Ok(th.cos() + s)
}

/// First correction factor of the main-sum approximation,
/// `psi(p) = cos(2pi(p^2 - p - 1/16)) / cos(2pi p)`, with the removable
/// poles at `p = 1/4, 3/4` patched by their linear limits.
pub(crate) fn psi(p: f64) -> f64 {
    let d = (TAU * p).cos();
    if d.abs() < 1e-6 {
        return if p < 0.5 {
            0.5 - (p - 0.25)
        } else {
            0.5 + (p - 0.75)
        };
    }
    (TAU * (p * p - p - 0.0625)).cos() / d
}

/// Derivative of [`psi`], with the same pole patches.
pub(crate) fn psi_prime(p: f64) -> f64 {
    let d = (TAU * p).cos();
    if d.abs() < 1e-6 {
        return if p < 0.5 { -1.0 } else { 1.0 };
    }
    let phi = p * p - p - 0.0625;
    let num = -TAU * (2.0 * p - 1.0) * (TAU * phi).sin();
    let dnum = TAU * (TAU * p).sin();
    (num * d + dnum * (TAU * phi).cos()) / (d * d)
}

/// Main-sum approximation of Z with its first correction term:
/// `2 sum_{m<=M} cos(theta - t ln m)/sqrt(m) + (-1)^{M+1} psi(p) / (t/2pi)^{1/4}`
/// where `M = floor(sqrt(t/2pi))` and `p` is the dropped fractional part.
///
/// Good to a few units in `t^{-3/4}`; the correction term is what keeps the
/// sign trustworthy near small values.
pub fn z_afe(t: f64) -> Result<f64> {
    let th = crate::special::theta(t)?;
    let a = (t / TAU).sqrt();
    let nt = a as usize;
    let p = a - nt as f64;
    let mut s = 0.0;
    for m in 1..=nt {
        let mf = m as f64;
        s += (th - mf.ln() * t).cos() / mf.sqrt();
    }
    let sign = if nt.is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(2.0 * s + sign * psi(p) / a.sqrt())
}

/// t-derivative of [`z_afe`] (main sum differentiated exactly, correction
/// term differentiated through `p` and the prefactor).
pub fn z_prime_afe(t: f64) -> Result<f64> {
    let series = ThetaSeries::default();
    let th = series.theta(t)?;
    let tp = series.theta_prime(t, DerivativeForm::Series)?;
    let a = (t / TAU).sqrt();
    let nt = a as usize;
    let p = a - nt as f64;
    let mut s = 0.0;
    for m in 1..=nt {
        let mf = m as f64;
        s += -(th - mf.ln() * t).sin() * (tp - mf.ln()) / mf.sqrt();
    }
    let sign = if nt.is_multiple_of(2) { -1.0 } else { 1.0 };
    // da/dt = 1/(4 pi a).
    let ap = 1.0 / (4.0 * PI * a);
    let rem = sign * (psi_prime(p) * ap / a.sqrt() - 0.5 * psi(p) * ap / (a * a.sqrt()));
    Ok(2.0 * s + rem)
}

/// One row of the shift-diagnostic table at a Gram point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TermRow {
    /// 1-based coefficient index.
    pub k: usize,
    /// `(-1)^n cos(ln(k+1) g_n)`.
    pub cos: f64,
    /// `(-1)^n sin(ln(k+1) g_n)`.
    pub sin: f64,
    /// Value sensitivity `A_k = (-1)^n cos(ln(k+1) g_n) / sqrt(k+1)`.
    pub a: f64,
    /// Leverage `B_k = (-1)^n ln(g_n/(2pi(k+1)^2)) sin(ln(k+1) g_n) / sqrt(k+1)`.
    pub b: f64,
}

/// Term diagnostics at `g_n` for `k = 1..=k_max`.
///
/// `A_k` is the signed first-order effect of `a_k` on the discriminant at
/// fixed `t`; `B_k` folds in how the extremum location moves, so large
/// positive `B_k` marks the terms worth shifting to push the signed
/// discriminant up.
pub fn term_table(n: i64, k_max: usize) -> Result<Vec<TermRow>> {
    if k_max == 0 {
        return Err(Error::EmptyTermTable);
    }
    let g = gram_point(n)?.t;
    let sgn = parity(n);
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let m = (k + 1) as f64;
        let (sn, cs) = (m.ln() * g).sin_cos();
        rows.push(TermRow {
            k,
            cos: sgn * cs,
            sin: sgn * sn,
            a: sgn * cs / m.sqrt(),
            b: sgn * (g / (TAU * m * m)).ln() * sn / m.sqrt(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::z0;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_random(len: usize, seed: u64) -> ParameterVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ParameterVector::from_dense((0..len).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    #[test]
    fn parameter_vector_basics() {
        let a = ParameterVector::ones(5);
        assert_eq!(a.len(), 5);
        assert_eq!(a.coefficient(3), 1.0);
        assert!(!a.is_zero());
        assert!(ParameterVector::zeros(5).is_zero());

        let a = a.with_set(2, 0.25).unwrap();
        assert_eq!(a.coefficient(2), 0.25);
        assert_eq!(a.coefficient(1), 1.0);
        assert_eq!(a.to_dense(), vec![1.0, 0.25, 1.0, 1.0, 1.0]);

        assert!(matches!(
            ParameterVector::zeros(5).with_set(0, 1.0),
            Err(Error::CoefficientIndex { index: 0, .. })
        ));
        assert!(matches!(
            ParameterVector::zeros(5).with_set(6, 1.0),
            Err(Error::CoefficientIndex { index: 6, .. })
        ));
        assert!(matches!(
            ParameterVector::from_dense(vec![1.0, f64::NAN]).validate(),
            Err(Error::NonFiniteCoefficient(2))
        ));
    }

    #[test]
    fn lerp_is_exact_at_endpoints_and_sparse() {
        let a = ParameterVector::uniform(8, 0.3).with_set(2, 0.9).unwrap();
        let b = ParameterVector::uniform(8, 0.7).with_set(5, -0.1).unwrap();
        assert_eq!(ParameterVector::lerp(&a, &b, 0.0).unwrap(), a);
        assert_eq!(ParameterVector::lerp(&a, &b, 1.0).unwrap(), b);
        let mid = ParameterVector::lerp(&a, &b, 0.5).unwrap();
        match &mid {
            ParameterVector::Uniform {
                value, overrides, ..
            } => {
                assert!((value - 0.5).abs() < 1e-15);
                assert_eq!(overrides.len(), 2);
            }
            _ => panic!("uniform blend densified"),
        }
        assert!((mid.coefficient(2) - 0.8).abs() < 1e-15);
        assert!((mid.coefficient(5) - 0.1).abs() < 1e-15);
        assert!((mid.coefficient(3) - 0.5).abs() < 1e-15);
        assert!(matches!(
            ParameterVector::lerp(&a, &ParameterVector::zeros(7), 0.5),
            Err(Error::BlendShape { .. })
        ));
    }

    #[test]
    fn dot_matches_dense() {
        let a = ParameterVector::uniform(6, 0.5)
            .with_set(1, 2.0)
            .unwrap()
            .with_set(4, -1.0)
            .unwrap();
        let w = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let dense: f64 = a
            .to_dense()
            .iter()
            .zip(&w)
            .map(|(x, y)| x * y)
            .sum();
        assert!((a.dot(&w) - dense).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_low_bits() {
        let mut k = Compensated::default();
        for x in [1e16, 1.0, -1e16] {
            k.add(x);
        }
        assert_eq!(k.value(), 1.0);
        let mut p = Plain::default();
        for x in [1e16, 1.0, -1e16] {
            p.add(x);
        }
        assert_eq!(p.value(), 0.0); // what the plain sum loses
    }

    #[test]
    fn zero_vector_gives_leading_section() {
        let ctx = SectionContext::new(50);
        for t in [10.0, 100.0, 1234.5] {
            let z = z_section(t, &ParameterVector::zeros(50), &ctx).unwrap();
            assert_eq!(z, z0(t).unwrap());
        }
    }

    #[test]
    fn section_is_affine_in_a() {
        let ctx = SectionContext::new(24);
        let t = 321.75;
        let a = dense_random(24, 7);
        let b = dense_random(24, 8);
        let (al, be) = (0.3, -1.2);
        let blended = ParameterVector::from_dense(
            a.to_dense()
                .iter()
                .zip(&b.to_dense())
                .map(|(&x, &y)| al * x + be * y)
                .collect(),
        );
        let lhs = z_section(t, &blended, &ctx).unwrap();
        let rhs = al * z_section(t, &a, &ctx).unwrap() + be * z_section(t, &b, &ctx).unwrap()
            + (1.0 - al - be) * z0(t).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn uniform_and_dense_agree() {
        let ctx = SectionContext::new(40);
        let a = ParameterVector::uniform(40, 0.41)
            .with_set(1, 1.0)
            .unwrap()
            .with_set(13, -0.7)
            .unwrap();
        let d = ParameterVector::from_dense(a.to_dense());
        let t = 555.25;
        let va = z_section_full(t, &a, &ctx, DerivativeForm::Series).unwrap();
        let vd = z_section_full(t, &d, &ctx, DerivativeForm::Series).unwrap();
        assert!((va.z - vd.z).abs() < 1e-12);
        assert!((va.dz - vd.dz).abs() < 1e-12);
        assert!((va.ddz - vd.ddz).abs() < 1e-11);
        assert!((va.z - z_section(t, &a, &ctx).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let ctx = SectionContext::new(10);
        assert!(matches!(
            z_section(100.0, &ParameterVector::ones(11), &ctx),
            Err(Error::LengthMismatch { got: 11, cap: 10 })
        ));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let ctx = SectionContext::new(30);
        let a = dense_random(30, 42);
        let t = 500.0;
        let h = 1e-4;
        let f = |t: f64| z_section(t, &a, &ctx).unwrap();
        let v = z_section_full(t, &a, &ctx, DerivativeForm::Series).unwrap();
        let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
        assert!(
            ((v.dz - fd1) / fd1).abs() < 1e-6,
            "dz {} vs fd {fd1}",
            v.dz
        );
        let g = |t: f64| {
            z_section_dt(t, &a, &ctx, DerivativeForm::Series).unwrap()
        };
        let fd2 = (g(t + h) - g(t - h)) / (2.0 * h);
        assert!(
            ((v.ddz - fd2) / fd2).abs() < 1e-4,
            "ddz {} vs fd {fd2}",
            v.ddz
        );
    }

    #[test]
    fn dt_vanishes_at_gram_points_for_zero_shift() {
        // With a = 0 the Gram point is exactly the extremum of Z_0.
        let zero = ParameterVector::zeros(1);
        let ctx = SectionContext::new(1);
        for n in [90i64, 126, 1000] {
            let g = gram_point(n).unwrap();
            for form in [DerivativeForm::Truncated, DerivativeForm::Series] {
                let dz = z_section_dt(g.t, &zero, &ctx, form).unwrap();
                assert!(dz.abs() < 1e-10, "dz = {dz} at n={n}");
            }
        }
    }

    #[test]
    fn dtt_truncated_closed_form_at_gram_points() {
        // Z''(g_n; 0) = (-1)^{n+1} ln^2(g_n/2pi) / 4 in the truncated form.
        let zero = ParameterVector::zeros(1);
        let ctx = SectionContext::new(1);
        for n in [90i64, 126] {
            let g = gram_point(n).unwrap();
            let ddz = z_section_dtt(g.t, &zero, &ctx, DerivativeForm::Truncated).unwrap();
            let l = (g.t / TAU).ln();
            let want = -crate::gram::parity(n) * 0.25 * l * l;
            assert!(
                ((ddz - want) / want).abs() < 1e-9,
                "ddz {ddz} vs {want} at n={n}"
            );
        }
    }

    #[test]
    fn afe_reference_values() {
        assert!((z_afe(1000.0).unwrap() - 0.9976696568809478).abs() < 1e-12);
        assert!((z_prime_afe(1000.0).unwrap() - 4.764287000603148).abs() < 1e-12);
        let g = gram_point(126).unwrap().t;
        assert!((z_afe(g).unwrap() - -0.028139123180890735).abs() < 1e-9);
        assert!((z_prime_afe(g).unwrap() - 2.69781990148116).abs() < 1e-9);
        let g = gram_point(730119).unwrap().t;
        let (z, zp) = (z_afe(g).unwrap(), z_prime_afe(g).unwrap());
        assert!((z - 4.979924985535793).abs() < 1e-6);
        assert!(((zp / z).abs() - 4.457731541631921).abs() < 1e-6);
    }

    #[test]
    fn afe_prime_matches_finite_differences() {
        for t in [500.0, 4321.0] {
            let h = 1e-4;
            let fd = (z_afe(t + h).unwrap() - z_afe(t - h).unwrap()) / (2.0 * h);
            let an = z_prime_afe(t).unwrap();
            assert!((fd - an).abs() < 1e-5, "z' {an} vs fd {fd} at t={t}");
        }
    }

    #[test]
    fn psi_pole_patches_are_continuous() {
        // psi(1/4) = 1/2 with slope -1; psi(3/4) = 1/2 with slope +1.
        assert!((psi(0.25) - 0.5).abs() < 1e-12);
        assert!((psi(0.75) - 0.5).abs() < 1e-12);
        assert!((psi(0.2501) - (0.5 - 1e-4)).abs() < 1e-3);
        assert!((psi(0.7501) - (0.5 + 1e-4)).abs() < 1e-3);
        assert!((psi_prime(0.2501) + 1.0).abs() < 2e-2);
        assert!((psi_prime(0.7501) - 1.0).abs() < 2e-2);
        // A height whose fractional part lands essentially on the pole.
        let t = TAU * 12.25 * 12.25;
        assert!(z_afe(t).unwrap().is_finite());
        assert!(z_prime_afe(t).unwrap().is_finite());
    }

    #[test]
    fn afe_tracks_the_convergent_expansion() {
        for t in [100.0, 1000.0, 10_000.0] {
            let gap = (z_afe(t).unwrap() - z_spira(t).unwrap()).abs();
            assert!(
                gap <= 5.0 * t.powf(-0.25),
                "gap {gap} too large at t={t}"
            );
        }
    }

    #[test]
    fn term_table_reference_rows() {
        let rows = term_table(730119, 15).unwrap();
        assert_eq!(rows.len(), 15);
        let r1 = rows[0];
        assert!((r1.cos - -0.13957327308854092).abs() < 1e-9);
        assert!((r1.sin - 0.9902117457591338).abs() < 1e-9);
        assert!((r1.a - -0.09869320787330914).abs() < 1e-9);
        assert!((r1.b - 6.857753083920167).abs() < 1e-6);
        let r3 = rows[2];
        assert!((r3.sin - 0.28).abs() < 0.01);
        assert!((r3.b - 1.1620315856680734).abs() < 1e-6);
        let r12 = rows[11];
        assert!((r12.b - 1.6404053524263316).abs() < 1e-6);
        assert!(matches!(term_table(10, 0), Err(Error::EmptyTermTable)));
    }

    #[test]
    fn term_table_resums_to_the_afe() {
        // 2((-1)^n + sum A_k) over the full main-sum range, plus the
        // correction term, reproduces z_afe at the Gram point.
        let n = 730119i64;
        let g = gram_point(n).unwrap().t;
        let nt = SectionContext::afe_terms(g);
        let rows = term_table(n, nt - 1).unwrap();
        let sum_a: f64 = rows.iter().map(|r| r.a).sum();
        let a = (g / TAU).sqrt();
        let p = a - nt as f64;
        let sign = if nt.is_multiple_of(2) { -1.0 } else { 1.0 };
        let resummed =
            2.0 * (crate::gram::parity(n) + sum_a) + sign * psi(p) / a.sqrt();
        let direct = z_afe(g).unwrap();
        assert!(
            (resummed - direct).abs() < 1e-6,
            "{resummed} vs {direct}"
        );
    }
}
