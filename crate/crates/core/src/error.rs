use thiserror::Error;

use crate::poly::{Point2, C64};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in input")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root finder did not converge (worst residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("polynomial vanishes identically")]
    AllZero,

    #[error("sup estimate did not stabilise within budget (doubling delta {delta:e})")]
    BudgetTooSmall { delta: f64 },

    #[error("the trace of the curve on the inner ball is empty")]
    EmptyTrace,

    #[error("function has a zero inside the Harnack disk")]
    NotZeroFree,

    #[error("normalization violated: sup log|phi| on the unit disk is {sup_log}")]
    NormalizationViolated { sup_log: f64 },

    #[error("no regular direction found after {tries} tries")]
    NoRegularDirection { tries: usize },

    #[error("every candidate circle dips below the threshold (best circle minimum {best})")]
    NoGoodCircle { best: f64 },

    #[error("zero on or crossing the contour for w = {w}")]
    ZeroOnContour { w: C64 },

    #[error("argument-principle count is not an integer (residual {residual})")]
    WindingNotInteger { residual: f64 },

    #[error("bound {which} violated at {worst:?} (margin {margin})")]
    BoundViolated {
        which: &'static str,
        worst: Point2,
        margin: f64,
    },

    #[error("box subdivision left {survivors} survivors without coarsening")]
    SubdivisionBudgetExceeded { survivors: usize },

    #[error("resultant vanishes identically (common factor)")]
    DegenerateResultant,

    #[error("branch collision could not be resolved near w = {w}")]
    CollisionUnresolved { w: C64 },

    #[error("f2 is constant, its zero set is not a curve")]
    NotACurve,

    #[error("polynomials share a common factor")]
    CommonFactor,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
