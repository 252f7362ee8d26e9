use thiserror::Error;

/// Errors produced by the walk engines and their classical counterparts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("position {x} outside [-{t_max}, {t_max}]")]
    PositionOutOfRange { x: i64, t_max: usize },

    #[error("coin register has length {got}, expected {expected}")]
    RegisterLength { got: usize, expected: usize },

    #[error("coin count mismatch: state has M={state}, operand has M={operand}")]
    CoinCountMismatch { state: usize, operand: usize },

    #[error("retention parameter {0} outside [0, 1]")]
    RhoOutOfRange(f64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("evolution would leave the horizon t_max={t_max}")]
    HorizonExceeded { t_max: usize },

    #[error("state norm {0} is not 1")]
    NotNormalized(f64),

    #[error("invalid chirality string {0:?}: expected only 'L' and 'R'")]
    InvalidChirality(String),

    #[error("history {key:?} has length {got}, expected {expected}")]
    HistoryLength { key: String, got: usize, expected: usize },

    #[error("pattern is empty")]
    EmptyPattern,

    #[error("pattern letter {0:?} has no game definition")]
    UnknownGame(char),

    #[error("duplicate game name {0:?}")]
    DuplicateGame(char),

    #[error("initial state has zero norm")]
    ZeroNorm,

    #[error("matrix is not row-stochastic: {0}")]
    NotStochastic(String),

    #[error("smoothing window must be odd and >= 1, got {0}")]
    InvalidWindow(usize),

    #[error("prominence fraction must lie in (0, 1), got {0}")]
    InvalidProminence(f64),

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("distribution points do not lie on a common lattice")]
    IrregularSupport,

    #[error("snapshot step {step} is beyond the run length {steps}")]
    SnapshotOutOfRange { step: usize, steps: usize },

    #[error("need at least one trajectory")]
    NoTrajectories,
}

pub type Result<T> = std::result::Result<T, WalkError>;
