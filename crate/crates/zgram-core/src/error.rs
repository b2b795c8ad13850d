//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// Solver failures carry the last trustworthy point so a caller can resume or
/// report where the computation died instead of just that it died.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The theta machinery is only defined for `t >= 2*pi`.
    #[error("t = {0} is below the 2*pi domain floor")]
    BelowDomain(f64),

    /// Principal-branch Lambert W needs `x >= -1/e`.
    #[error("lambert_w0 argument {0} is below -1/e")]
    LambertDomain(f64),

    /// Asymptotic correction order is limited to 0, 1 or 2.
    #[error("correction order {0} is not one of 0, 1, 2")]
    BadCorrectionOrder(u8),

    /// Gram points are indexed from n = -1.
    #[error("Gram index {0} is outside the supported range (n >= -1)")]
    GramIndex(i64),

    /// Core zeros are indexed from n = 2.
    #[error("core zero index {0} is outside the supported range (n >= 2)")]
    CoreZeroIndex(i64),

    /// A plain root solve hit its iteration cap without meeting tolerance.
    #[error("root solve stalled near t = {t}")]
    SolverStalled { t: f64 },

    /// Continuation ran out of step budget; `s` and `t` are the last accepted
    /// path position and extremum location.
    #[error("continuation did not converge past s = {s} (last good t = {t})")]
    NoConvergence { s: f64, t: f64 },

    /// The tracked extremum changed type or left its window; `s` and `t` are
    /// the last accepted path position and extremum location.
    #[error("extremum lost past s = {s} (last good t = {t})")]
    ExtremumLost { s: f64, t: f64 },

    /// A shift coefficient was NaN or infinite.
    #[error("coefficient a_{0} is not finite")]
    NonFiniteCoefficient(usize),

    /// A 1-based coefficient index fell outside the vector.
    #[error("coefficient index {index} is outside 1..={len}")]
    CoefficientIndex { index: usize, len: usize },

    /// A parameter vector is longer than the term table it is paired with.
    #[error("parameter vector holds {got} coefficients but the context holds {cap} terms")]
    LengthMismatch { got: usize, cap: usize },

    /// Two parameter vectors of different lengths cannot be blended.
    #[error("cannot blend parameter vectors of lengths {left} and {right}")]
    BlendShape { left: usize, right: usize },

    /// An index range with `lo > hi`.
    #[error("invalid range: lo = {lo} exceeds hi = {hi}")]
    BadRange { lo: i64, hi: i64 },

    /// Block assembly could not find a good Gram point bracketing the range.
    #[error("no good Gram point within {searched} indices of n = {n}")]
    NoGoodEndpoint { n: i64, searched: i64 },

    /// A curve specification that fails validation.
    #[error("malformed curve: {0}")]
    BadCurve(String),

    /// Asked for more shift indices than the table holds.
    #[error("cannot pick {count} indices from a table of {k_max}")]
    BadSelection { count: usize, k_max: usize },

    /// A term table must have at least one row.
    #[error("k_max must be at least 1")]
    EmptyTermTable,
}
