use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("professor {id}: {reason}")]
    InvalidProfessor { id: String, reason: String },

    #[error("publication {id}: {reason}")]
    InvalidPublication { id: String, reason: String },

    #[error("publication {publication}: author {author} is not on the roster")]
    UnknownAuthor { publication: String, author: String },

    #[error("professor {id}: census date {census} precedes {what} {date}")]
    CensusBeforeDate {
        id: String,
        what: &'static str,
        census: chrono::NaiveDate,
        date: chrono::NaiveDate,
    },

    #[error("invalid date span {start}..{end}")]
    InvalidSpan {
        start: chrono::NaiveDate,
        end: chrono::NaiveDate,
    },

    #[error("byline position {position} out of range for {len} authors")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("no credit convention configured for SDS {0}")]
    UnresolvedConvention(String),

    #[error("publication {publication}: no {what} scaling factor for ({year}, {category})")]
    MissingScalingCell {
        publication: String,
        what: &'static str,
        year: i32,
        category: String,
    },

    #[error("publication {0}: journal impact factor unknown")]
    MissingImpactFactor(String),

    #[error("years of work must be positive, got {0}")]
    NonPositiveYears(f64),

    #[error("empty cohort")]
    EmptyCohort,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("design is empty after filtering")]
    EmptyDesign,

    #[error("dependent variable is constant")]
    ConstantDependent,

    #[error("dependent variable outside [0, 1]: {0}")]
    ResponseOutOfRange(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error(
        "solver did not converge after {iterations} iterations (gradient sup-norm {gradient})"
    )]
    NotConverged { iterations: usize, gradient: f64 },

    #[error("quasi-separation: linear predictor reached {max_eta} (coefficients diverging)")]
    QuasiSeparation { max_eta: f64 },

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("null quasi-log-likelihood is zero; pseudo R-squared undefined")]
    DegenerateNullLikelihood,

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("correlation target {target} infeasible; achievable range [{low:.3}, {high:.3}]")]
    InfeasibleCorrelation { target: f64, low: f64, high: f64 },

    #[error("bin width must be positive and finite, got {0}")]
    InvalidBinWidth(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("fit for group {0} did not converge")]
    UnconvergedFit(String),

    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },
}
