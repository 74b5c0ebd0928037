use market_core::{HospitalId, MarketError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("hospital {0} is not part of the submarket")]
    NotInSubmarket(HospitalId),
    #[error("capacity {capacity} for hospital {hospital} exceeds its quota {quota}")]
    CapacityAboveQuota { hospital: HospitalId, capacity: usize, quota: usize },
    #[error("tier {tier} is out of range 1..={tiers}")]
    InvalidTier { tier: usize, tiers: usize },
    #[error("hospital {hospital} is not in tier {tier}")]
    NotInTier { hospital: HospitalId, tier: usize },
    #[error("tier labels must cover 1..=K for {expected} hospitals: {reason}")]
    TierShape { expected: usize, reason: String },
    #[error("seat order is not a permutation of {seats} seats")]
    InvalidSeatOrder { seats: usize },
    #[error("priority order must list every hospital exactly once")]
    InvalidPriority,
}
