use market_core::{MarketError, ParseError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcessError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid lottery: {0}")]
    Lottery(String),
    #[error("discount factor {0} is outside [0, 1)")]
    Discount(String),
    #[error("state index {0} is out of range")]
    UnknownState(usize),
    #[error("realization {realization} refers to cohort {cohort}, but only {cohorts} cohorts were supplied")]
    CohortOutOfRange { realization: String, cohort: usize, cohorts: usize },
    #[error("realization {realization} is not a valid matching: {source}")]
    InvalidRealization { realization: String, source: MarketError },
    #[error("cohort markets must share the same hospitals")]
    CohortMismatch,
    #[error("precondition failed: {0}")]
    Precondition(String),
}
