//! Constructions of self-enforcing matching processes: the two-state trigger
//! process, the folk-theorem automaton with player-specific punishments and
//! the capacity-reducing process on tiered random markets, together with a
//! discount-factor bisection and the elite deviation audit.

pub mod audit;
pub mod bisect;
pub mod capacity;
pub mod error;
pub mod folk;
mod machine;
pub mod scheme;
pub mod structure;
pub mod trigger;

pub use audit::{elite_deviation_audit, AuditEntry, AuditReport};
pub use bisect::{min_delta_bisect, BisectOutcome};
pub use capacity::{build_capacity_process, build_capacity_process_unchecked, sample_cohorts, CapacityOptions, CapacityProcess, MarginReport};
pub use error::FolkError;
pub use folk::build_folk_automaton;
pub use scheme::{
    default_punishment_length, find_player_specific_punishments, lottery_value, Punishment, PunishmentScheme,
    SchemeOptions,
};
pub use structure::check_outputs;
pub use trigger::build_trigger_process;
