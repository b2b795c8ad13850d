//! Numerics for Gram points of the Hardy Z-function and a family of
//! dirichlet-polynomial sections around them.
//!
//! The library computes Gram points `theta(g_n) = pi n` to near machine
//! precision, evaluates sections `Z_N(t; a)` with per-term coefficient
//! shifts, and follows the Gram discriminant — the section value at the
//! tracked extremum — along curves through coefficient space. On top of
//! that sit closed-form gradients and Hessians of the discriminant at the
//! reference shift, a good/bad Gram point classifier with a viscosity
//! (repulsion) measure, and block bookkeeping for runs of bad points.
//!
//! ```
//! use zgram_core::{classify, gram_point};
//!
//! let g = gram_point(126).unwrap();
//! assert!((g.t - 282.4547208234622).abs() < 1e-9);
//! // g_126 is one of the first two bad Gram points.
//! assert!(!classify(126).unwrap().good);
//! ```

pub mod classify;
pub mod curves;
pub mod discriminant;
pub mod error;
pub mod gram;
pub mod section;
pub mod special;

pub use classify::{
    blocks, classify, classify_range, is_isolated_bad, repulsion_scan, scan, GramBlock,
    GramClassRecord, RepulsionReport, RepulsionRow, ScanReport, ScanRow, REPULSION_BOUND,
    UNCERTAIN_FLOOR_SCALE,
};
pub use curves::{
    curve_eval, sign_violations, suggest_shift_indices, trace_discriminant, CurveSample,
    CurveSpec, CurveTrace, DEFAULT_GRID,
};
pub use discriminant::{
    discriminant, discriminant_gradient, extend_gram_point, extend_gram_point_with,
    gram_point_gradient, hessian_entry, hessian_form, second_order_approx,
    z_prime_via_gradient, ContinuationOptions, DiscriminantRecord, ExtendedGramPoint,
    HESSIAN_PRIME_FACTOR,
};
pub use error::{Error, Result};
pub use gram::{core_zero, gram_point, gram_point_with, z0, CoreZero, GramPoint};
pub use section::{
    term_table, z_afe, z_prime_afe, z_section, z_section_dt, z_section_dtt, z_section_full,
    z_spira, ParameterVector, SectionContext, SectionValues, TermRow,
};
pub use special::{
    lambert_w0, theta, theta_prime, theta_second, DerivativeForm, ThetaSeries,
    DEFAULT_CORRECTION_ORDER,
};
