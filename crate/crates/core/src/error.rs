use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("draw set is empty")]
    EmptyDraws,

    #[error("draw {index} is not finite")]
    NonFiniteDraw { index: usize },

    #[error("hypothesis value must be finite")]
    NonFiniteHypothesis,

    #[error("need at least {needed} draws, got {got}")]
    TooFewDraws { needed: usize, got: usize },

    #[error("chain is constant; effective sample size is undefined")]
    ConstantChain,

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("observation {index} = {value} rejected: {reason}")]
    InvalidValue {
        index: usize,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("coefficient of variation undefined: population mean is zero")]
    UndefinedCv,

    #[error("every posterior draw had an undefined coefficient of variation")]
    AllCvUndefined,

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("log density is not finite at the initial point")]
    NonFiniteInitialDensity,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
