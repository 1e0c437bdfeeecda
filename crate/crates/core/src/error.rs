use thiserror::Error;

/// Errors raised by model queries, transformations and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown state reference #{0}")]
    UnknownState(u32),
    #[error("action `{action}` is not enabled at state {state}")]
    DisabledAction { state: String, action: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("probability error: {0}")]
    Probability(String),
    #[error("scheduler is undefined at state {0}")]
    SchedulerGap(String),
    #[error("rule {rule} is not applicable at configuration {config}")]
    InapplicableRule { rule: String, config: String },
    #[error("initial state is certified to avoid the goal; the value is trivially 0")]
    TrivialZero,
    #[error("exploration exceeded the state cap of {cap} states")]
    BranchingExplosion { cap: usize },
    #[error("value vector has no entry for state index {0}")]
    MissingValue(usize),
    #[error("iteration budget of {0} backups exceeded")]
    IterationBudgetExceeded(u64),
    #[error("scheduler enumeration of {count} schedulers exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
    #[error("operation requires exact probabilities but the model is in float mode")]
    InexactModel,
    #[error("model does not declare finite action-branching")]
    NotFinitelyBranching,
    #[error("model is not finite")]
    InfiniteModel,
    #[error("optimality certificate failed: {0}")]
    CertificateFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
