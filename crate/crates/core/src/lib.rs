//! Symbolic-numeric toolkit for Schwarzian differential equations of genus-zero
//! Fuchsian uniformizers.
//!
//! The library is organized around an exact pipeline (arbitrary-precision
//! rationals everywhere) with one deliberately numeric module:
//!
//! * [`poly`], [`ratfunc`]: dense univariate polynomials and reduced rational
//!   functions over the rationals, with partial fractions and squarefree
//!   factorization.
//! * [`series`]: truncated Laurent series with explicit precision tracking.
//! * [`schwarzian`]: Schwarzian equations `S(y) + (1/2) (y')^2 R(y) = 0` for
//!   hauptmoduls, triangle-group and classical-j builders, normal form and
//!   Riccati reductions, and the cleared differential-polynomial form.
//! * [`kovacic`]: the Kovacic decision procedure for Liouvillian solutions of
//!   `z'' = r z`, with exact certificates, plus the closed-form fast path for
//!   triangle signatures.
//! * [`monodromy`]: numerical monodromy of the normal form along loops, with
//!   trace and relation diagnostics.
//! * [`qmodular`]: exact q-expansions (the modular j-invariant), Schwarzian
//!   verification on series, and modular polynomials of level 2 and 3.
//! * [`bounds`]: effective big-integer degree bounds.
//!
//! Certificates are exact: every claimed solution or non-existence verdict is
//! either re-verified by substitution or accompanied by the exhaustive list of
//! rejected candidates.

pub mod bounds;
pub(crate) mod factorint;
pub mod kovacic;
pub(crate) mod linalg;
pub mod monodromy;
pub mod parse;
pub mod poly;
pub mod qmodular;
pub mod ratfunc;
pub mod rational;
pub mod schwarzian;
pub mod series;
pub mod surd;

pub use bounds::{andre_pink_bound, digit_count, zariski_closure_bound, BoundInput, BIT_LIMIT};
pub use kovacic::{
    case1, case2, case3, classify_singularities, condition_ric, condition_ric_r,
    condition_ric_r_with, decide_liouvillian, decide_liouvillian_with, is_fuchsian,
    triangle_algebraic_riccati, triangle_reducibility, triangle_strong_minimality,
    Case1Certificate, Case2Certificate, Case3Certificate, Case3Outcome, CaseTag, KovacicOptions,
    KovacicVerdict, PointKind, RicReport, SingularPoint,
};
pub use monodromy::{
    infinity_loop, integrate_ode_along, monodromy_report, monodromy_report_with_base,
    standard_loops, LoopRow, Matrix2C, MonodromyReport, PathLoop, PathSegment,
};
pub use poly::Poly;
pub use qmodular::{
    compute_special_poly, j_series, verify_schwarzian_q, verify_special_poly, LaurentQSeries,
    ResidualReport, SpecialPoly,
};
pub use parse::parse_ratfunc;
pub use ratfunc::{PartialFractionForm, RatFunc};
pub use rational::{Location, Rational};
pub use schwarzian::{
    classical_j_r, mobius_series, normal_form_from_exponent_differences, rescale_hauptmodul,
    schwarzian_of_series, schwarzian_via_jets, schwarzian_via_log_derivative, three_point_r,
    triangle_r, ClearedForm, Order, SchwarzianEquation, Signature, TriangleParams,
};
pub use series::LaurentSeries;

/// Unified error type for the exact and numeric pipelines.
///
/// Exactness failures (irrational poles, inconclusive factorizations) are
/// reported rather than approximated; numeric failures carry enough context to
/// retune tolerances.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation at a pole: {0}")]
    PoleEvaluation(String),
    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },
    #[error("denominator does not split over the rationals; residual factor of degree {degree}: {factor}")]
    IrrationalPole { degree: usize, factor: String },
    #[error("integer factorization gave up on a {bits}-bit composite; cannot certify the root search")]
    FactorizationInconclusive { bits: u64 },
    #[error("signature must list at least three orders, each 2 or more")]
    InvalidSignature,
    #[error("signature is not hyperbolic: the angle sum is at least pi")]
    NotHyperbolic,
    #[error("accessory parameters violate the regularity conditions at infinity")]
    AccessoryConstraint,
    #[error("equation data is inconsistent: points, angles, and accessories must align")]
    InvalidEquation,
    #[error("series precision too small: need O(q^{needed}) but only O(q^{have}) is known")]
    PrecisionTooSmall { needed: i64, have: i64 },
    #[error("operation undefined for this series")]
    SeriesUndefined,
    #[error("input outside the supported class: {0}")]
    Unsupported(String),
    #[error("system does not determine the accessory parameters; supply them explicitly")]
    Underdetermined,
    #[error("numerical integration failed: {0}")]
    Numeric(String),
    #[error("bound would exceed {limit_bits} bits; refusing to materialize it")]
    BoundTooLarge { limit_bits: u64 },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
