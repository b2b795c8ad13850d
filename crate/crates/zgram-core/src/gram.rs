//! Gram points and the Lambert-form core zeros.
//!
//! The n-th Gram point solves `theta(g_n) = pi n` for `n >= -1`. A Lambert W
//! seed lands close enough that plain Newton in binary64 converges in a
//! handful of steps; the solver keeps the best iterate seen so the returned
//! residual is the true floating-point measure at the reported point, not
//! whatever the last step happened to produce.

use crate::error::{Error, Result};
use crate::special::{lambert_w0, DerivativeForm, ThetaSeries};
use std::f64::consts::{E, PI, TAU};

/// A solved Gram point: `theta(t) = pi n` up to `residual`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramPoint {
    /// Index, from -1 up.
    pub n: i64,
    /// Location on the critical line.
    pub t: f64,
    /// `|theta(t) - pi n|` evaluated in binary64 at `t`.
    pub residual: f64,
}

/// A core zero `t_n` of the leading section, in closed Lambert form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreZero {
    /// Index, from 2 up.
    pub n: i64,
    /// Location on the critical line.
    pub t: f64,
}

/// `(-1)^n` as a float, valid for negative `n` too.
#[inline]
pub(crate) fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

const NEWTON_CAP: u32 = 60;

/// Solves `theta(t) = pi n` with a caller-supplied series.
pub fn gram_point_with(series: ThetaSeries, n: i64) -> Result<GramPoint> {
    if n < -1 {
        return Err(Error::GramIndex(n));
    }
    let target = PI * n as f64;
    // Inverting the leading terms of theta gives the seed
    // t = 2pi exp(1 + W((8n+1)/(8e))); the W argument stays above -1/e for
    // every admissible n.
    let seed = lambert_w0((8.0 * n as f64 + 1.0) / (8.0 * E))?;
    let mut t = TAU * (1.0 + seed).exp();
    let mut best_t = t;
    let mut best_f = (series.theta(t)? - target).abs();
    for _ in 0..NEWTON_CAP {
        let f = series.theta(t)? - target;
        if f.abs() < best_f {
            best_f = f.abs();
            best_t = t;
        }
        let fp = series.theta_prime(t, DerivativeForm::Series)?;
        let mut tn = t - f / fp;
        if tn.is_nan() || tn <= TAU {
            // Never happens from the Lambert seed, but don't let a wild step
            // leave the domain.
            tn = 0.5 * (t + TAU);
        }
        if tn == t {
            break;
        }
        t = tn;
    }
    let f = series.theta(t)? - target;
    if f.abs() < best_f {
        best_f = f.abs();
        best_t = t;
    }
    if best_f.is_nan() || best_f >= 1e-6 {
        return Err(Error::SolverStalled { t: best_t });
    }
    Ok(GramPoint {
        n,
        t: best_t,
        residual: best_f,
    })
}

/// Solves `theta(t) = pi n` at the default correction order.
pub fn gram_point(n: i64) -> Result<GramPoint> {
    gram_point_with(ThetaSeries::default(), n)
}

/// The leading section `Z_0(t) = cos(theta(t))`.
pub fn z0(t: f64) -> Result<f64> {
    Ok(crate::special::theta(t)?.cos())
}

/// The n-th core zero `t_n = (8n-11) pi / (4 W((8n-11)/(8e)))`, `n >= 2`.
///
/// These sit where `theta(t_n) ~ (n - 3/2) pi`, i.e. at the sign changes of
/// the leading section between consecutive Gram points.
pub fn core_zero(n: i64) -> Result<CoreZero> {
    if n < 2 {
        return Err(Error::CoreZeroIndex(n));
    }
    let num = 8.0 * n as f64 - 11.0;
    let w = lambert_w0(num / (8.0 * E))?;
    Ok(CoreZero {
        n,
        t: num * PI / (4.0 * w),
    })
}
