use market_core::MarketError;
use static_algorithms::AlgorithmError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LargeMarketError {
    #[error("invalid tier config: {0}")]
    Config(String),
    #[error("invalid experiment parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}
