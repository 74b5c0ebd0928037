//! Bundled tier configurations.

use crate::TierConfig;

pub const CAPACITY: &str = include_str!("../../../fixtures/capacity.toml");
pub const ELITE: &str = include_str!("../../../fixtures/elite.toml");

pub fn capacity() -> TierConfig {
    TierConfig::from_toml(CAPACITY).expect("bundled config parses")
}

pub fn elite() -> TierConfig {
    TierConfig::from_toml(ELITE).expect("bundled config parses")
}
