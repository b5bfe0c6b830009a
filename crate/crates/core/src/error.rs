use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input.
    Input,
    /// The input was well formed but the computation could not complete.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("duplicate component `{0}`")]
    DuplicateComponent(String),
    #[error("universe has {0} components; at most {max} are supported", max = crate::lattice::MAX_COMPONENTS)]
    UniverseTooLarge(usize),
    #[error("component sets belong to different universes")]
    UniverseMismatch,
    #[error("coalition {0} is missing from the table")]
    MissingCoalition(String),
    #[error("component `{0}` is already a member of the coalition")]
    MemberAlreadyPresent(String),
    #[error("table holds {present} of the {required} coalitions required")]
    IncompleteTable { present: usize, required: usize },
    #[error("non-finite value for coalition {0}")]
    NonFiniteValue(String),
    #[error("all Shapley values are zero")]
    AllZero,
    #[error("audit would enumerate {0} triples, above the supported limit")]
    TooManyTriples(u64),
    #[error("gap thresholds must be non-negative and ascending")]
    InvalidThresholds,

    #[error("design has {rows} rows but {params} parameters")]
    TooFewRows { rows: usize, params: usize },
    #[error("design is rank deficient at column `{0}`")]
    RankDeficient(String),
    #[error("observation {0} has leverage one; leave-one-out is undefined")]
    LeverageOne(usize),
    #[error("residual sum of squares is zero; information criteria diverge to -inf")]
    ZeroRss,
    #[error("fit has no pairwise couplings")]
    NotPairwiseFit,

    #[error("need at least {min} units, got {got}")]
    TooFewUnits { got: usize, min: usize },
    #[error("paired vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("differences have zero variance")]
    ZeroVariance,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("no discordant pairs")]
    NoDiscordantPairs,
    #[error("numerical integration did not converge: {0}")]
    IntegrationFailure(String),
    #[error("task matrix lacks coalition {0}")]
    IncompleteMatrix(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate coalition {0}")]
    DuplicateCoalition(String),
    #[error("non-finite value at line {0}")]
    NonFiniteAtLine(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::RankDeficient(_)
            | Error::LeverageOne(_)
            | Error::ZeroRss
            | Error::ZeroVariance
            | Error::IntegrationFailure(_)
            | Error::AllZero => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
