//! Constructive stage-game algorithms: deferred acceptance, the top coalition
//! sequence, punitive matchings, seat serial dictatorships and the tiered
//! three-step template that strings them together.

pub mod deferred_acceptance;
pub mod error;
pub mod layered;
pub mod punitive;
pub mod serial_dictatorship;
pub mod submarket;
pub mod top_coalition;

pub use deferred_acceptance::{deferred_acceptance, deferred_acceptance_in, Proposer};
pub use error::AlgorithmError;
pub use layered::{layered_matching, layered_matching_with, InnerRule, Tiers};
pub use punitive::{punitive_matching, punitive_matching_with, PunitiveOrder};
pub use serial_dictatorship::{seat_list, serial_dictatorship_seats, serial_dictatorship_with_rng, SeatOrder};
pub use submarket::Submarket;
pub use top_coalition::{
    is_top_coalition, top_coalition_for, top_coalition_sequence, top_coalition_sequence_by, TopCoalitionSequence,
};
