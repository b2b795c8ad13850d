//! Riemann-Siegel theta asymptotics and the principal Lambert W branch.
//!
//! Everything downstream (Gram points, section evaluation, continuation)
//! leans on these two functions, so they are kept dependency-free and
//! deliberately boring: fixed-order asymptotic series in binary64, nothing
//! adaptive.

use crate::error::{Error, Result};
use std::f64::consts::{E, PI, TAU};

/// Highest asymptotic correction order baked into [`ThetaSeries`].
pub const DEFAULT_CORRECTION_ORDER: u8 = 2;

/// Which form of a theta derivative to evaluate.
///
/// `Truncated` differentiates only the leading terms of theta and is the
/// right object for the closed-form discriminant identities; `Series`
/// differentiates the full correction series and is what the Newton solvers
/// want.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeForm {
    /// Leading-term derivative: `theta' = ln(t/2pi)/2`, `theta'' = 1/(2t)`.
    Truncated,
    /// Derivative of the full correction series at the configured order.
    Series,
}

/// The theta function `theta(t) ~ (t/2) ln(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3)`
/// with a configurable number of correction terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaSeries {
    correction_order: u8,
}

impl Default for ThetaSeries {
    fn default() -> Self {
        ThetaSeries {
            correction_order: DEFAULT_CORRECTION_ORDER,
        }
    }
}

#[inline]
fn check_domain(t: f64) -> Result<()> {
    // Also rejects NaN: the comparison below is false for it.
    if t >= TAU {
        Ok(())
    } else {
        Err(Error::BelowDomain(t))
    }
}

impl ThetaSeries {
    /// Builds a series clipped at `correction_order` terms (0, 1 or 2).
    pub fn new(correction_order: u8) -> Result<Self> {
        if correction_order > DEFAULT_CORRECTION_ORDER {
            return Err(Error::BadCorrectionOrder(correction_order));
        }
        Ok(ThetaSeries { correction_order })
    }

    /// The configured correction order.
    pub fn correction_order(self) -> u8 {
        self.correction_order
    }

    /// `theta(t)` for `t >= 2*pi`.
    pub fn theta(self, t: f64) -> Result<f64> {
        check_domain(t)?;
        let l = (t / TAU).ln();
        let mut v = 0.5 * t * l - 0.5 * t - PI / 8.0;
        if self.correction_order >= 1 {
            v += 1.0 / (48.0 * t);
        }
        if self.correction_order >= 2 {
            v += 7.0 / (5760.0 * t * t * t);
        }
        Ok(v)
    }

    /// `theta'(t)`.
    ///
    /// Note the series form dips slightly negative in a thin band just above
    /// `2*pi`; by `t ~ 6.5` it is safely positive and increasing.
    pub fn theta_prime(self, t: f64, form: DerivativeForm) -> Result<f64> {
        check_domain(t)?;
        let mut v = 0.5 * (t / TAU).ln();
        if form == DerivativeForm::Series {
            if self.correction_order >= 1 {
                v -= 1.0 / (48.0 * t * t);
            }
            if self.correction_order >= 2 {
                v -= 21.0 / (5760.0 * t * t * t * t);
            }
        }
        Ok(v)
    }

    /// `theta''(t)`.
    pub fn theta_second(self, t: f64, form: DerivativeForm) -> Result<f64> {
        check_domain(t)?;
        let mut v = 0.5 / t;
        if form == DerivativeForm::Series {
            if self.correction_order >= 1 {
                v += 1.0 / (24.0 * t * t * t);
            }
            if self.correction_order >= 2 {
                v += 7.0 / (480.0 * t * t * t * t * t);
            }
        }
        Ok(v)
    }
}

/// `theta(t)` at the default correction order.
pub fn theta(t: f64) -> Result<f64> {
    ThetaSeries::default().theta(t)
}

/// `theta'(t)` at the default correction order.
pub fn theta_prime(t: f64, form: DerivativeForm) -> Result<f64> {
    ThetaSeries::default().theta_prime(t, form)
}

/// `theta''(t)` at the default correction order.
pub fn theta_second(t: f64, form: DerivativeForm) -> Result<f64> {
    ThetaSeries::default().theta_second(t, form)
}

/// Principal branch of the Lambert W function, real for `x >= -1/e`.
///
/// Halley iteration from a branch-dependent seed; stops when the residual
/// `w e^w - x` or the step drops below `1e-16 * max(1, |.|)`. The residual
/// stays below `1e-14 * max(1, |x|)` across the whole real branch.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let floor = -1.0 / E;
    if x.is_nan() || x < floor {
        return Err(Error::LambertDomain(x));
    }
    let mut w = if x > E {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else if x < -0.3 {
        // Series around the branch point; the max() guards against E * x
        // rounding a hair below -1 at the floor itself.
        let p = (2.0 * (1.0 + E * x).max(0.0)).sqrt();
        -1.0 + p - p * p / 3.0
    } else {
        x.ln_1p()
    };
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
        let step = f / (ew * (w + 1.0) - f * (w + 2.0) / (2.0 * (w + 1.0)));
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1.0) {
            break;
        }
    }
    Ok(w)
}
