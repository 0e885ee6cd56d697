use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("series order must be at least 1")]
    EmptySeries,
    #[error("series is not normalized: a1 = {0}")]
    NotNormalized(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("B1 must be positive, got {0}")]
    B1NotPositive(f64),
    #[error("profile `{0}` has no region predicate")]
    NoRegionPredicate(String),
    #[error("profile `{0}` has no closed form")]
    NoClosedForm(String),
    #[error("cannot parse profile `{input}`: {reason}")]
    ProfileSyntax { input: String, reason: String },

    #[error("lambda must be finite and >= 0, got {0}")]
    InvalidLambda(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("eta must be finite and > 0, got {0}")]
    InvalidEta(f64),
    #[error("point ({x}, {y}) lies on the singular line x + y = 2")]
    OnSingularLine { x: f64, y: f64 },
    #[error("oracle box half-width {half_width} too small, need > {required}")]
    BoxTooSmall { half_width: f64, required: f64 },
    #[error("invalid oracle configuration: {0}")]
    InvalidOracleConfig(String),

    #[error("nu must exceed 1, got {0}")]
    DegenerateDisk(f64),
    #[error("bracket [{lo}, {hi}] does not bracket the membership threshold: {reason}")]
    InvalidBracket { lo: f64, hi: f64, reason: String },
    #[error("invalid membership configuration: {0}")]
    InvalidMembershipConfig(String),
    #[error("coefficient bound violated: {0}")]
    BoundViolation(String),

    #[error("invalid Schwarz data: {0}")]
    InvalidSchwarz(String),
    #[error("theorem violated by sample {index}: {detail}")]
    TheoremViolation { index: u64, detail: String },
}
