//! Stage game of a many-to-one matching market with additive hospital
//! utilities: matchings, stability, single-hospital deviations and the
//! brute-force oracles used to validate faster algorithms.

pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod market;
pub mod scalar;
pub mod stability;
#[cfg(feature = "testing")]
pub mod testing;

pub use enumerate::{enumerate_ir_matchings, enumerate_stable_matchings, for_each_ir_matching, EnumerationCap, Restriction};
pub use error::{MarketError, ParseError};
pub use format::{parse_market_document, parse_matching, write_market_document, write_matching, Cohort, MarketDocument};
pub use market::{HospitalId, HospitalSpec, Matching, MarketSpec, StudentId, StudentSpec};
pub use scalar::Scalar;
pub use stability::{for_each_subset, Attribution, Coalition, CoalitionScan};

pub use num_rational::BigRational;

/// Market with floating-point utilities.
pub type Market = MarketSpec<f64>;
/// Market with exact rational utilities.
pub type ExactMarket = MarketSpec<BigRational>;
