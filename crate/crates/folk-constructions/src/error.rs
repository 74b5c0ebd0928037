use large_market::LargeMarketError;
use market_core::MarketError;
use repeated_core::ProcessError;
use static_algorithms::AlgorithmError;
use thiserror::Error;

use crate::MarginReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FolkError {
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    LargeMarket(#[from] LargeMarketError),
    #[error("invalid input: {0}")]
    Input(String),
    /// The search gave up; this is not a proof that nothing exists.
    #[error("not found within the search budget: {0}")]
    NotFound(String),
    #[error("payoff margins are not all positive: {0}")]
    Margins(Box<MarginReport>),
    #[error("verdict does not change monotonically: passes at {lo} but fails at {hi}")]
    NonMonotone { lo: f64, hi: f64 },
}
