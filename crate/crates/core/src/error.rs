use crate::model::IsotropyResult;
use crate::polytope::PolytopeReport;

/// Crate-wide error type. Variants mirror the failure modes named in the
/// operation contracts (parse/dimension/rank/sign for input validation,
/// range/singular for numeric domain violations, cap for enumeration limits,
/// and the solver-specific conditions).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("rank error: {0}")]
    Rank(String),

    #[error("sign error: {0}")]
    Sign(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("singular error: {0}")]
    Singular(String),

    #[error("enumeration cap exceeded: {0}")]
    Cap(String),

    #[error("infeasible: {reason}")]
    Infeasible {
        reason: String,
        report: Box<PolytopeReport>,
    },

    #[error("reducible instance: {0}")]
    Reducible(String),

    #[error("missing alpha: {0}")]
    MissingAlpha(String),

    #[error(
        "did not converge: gradient norm {:.3e} after {} iterations",
        best.grad_norm,
        best.iterations
    )]
    NonConvergence { best: Box<IsotropyResult> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
