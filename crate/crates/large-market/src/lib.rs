//! Tiered random markets: hospitals and students sorted into quality tiers,
//! within-tier preferences uniformly random, hospital values `C + ζ`.
//! Seeded Monte Carlo experiments measure the punishment and reward
//! matchings at finite market sizes. Everything here is `f64`.

pub mod achievable;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod generate;
pub mod harness;

pub use achievable::achievable_classes;
pub use config::{largest_remainder, ExperimentParams, TierConfig, TierSizes, ValueForm};
pub use error::LargeMarketError;
pub use experiments::{
    clustering, no_deviation_from_punishment, punishment_gap, rank_distribution, top_fill_probability, Counterexample,
    Experiment, GapReport, NoDeviationReport, RankHistogram, StatRow,
};
pub use generate::{generate_market, generate_market_with, RealizedMarket};
pub use harness::{run_trials, trial_rng, Estimate};
