//! Matching processes represented as finite automata with lottery states:
//! continuation values, the one-shot deviation checker and minmax payoffs.

pub mod automaton;
pub mod checker;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod lock;
pub mod lottery;
pub mod minmax;
pub mod simulate;
#[cfg(feature = "testing")]
pub mod testing;
pub mod values;

pub use automaton::{stationary_process, ProcessAutomaton, Realization, State, Transition};
pub use checker::{best_deviation, check_self_enforcing, check_self_enforcing_cohorts, ScanMode, Verdict, Witness};
pub use error::ProcessError;
pub use format::{parse_automaton, write_automaton};
pub use lock::{verify_top_coalition_lock, verify_top_coalition_lock_cohorts};
pub use lottery::Lottery;
pub use minmax::{naive_minmax, naive_minmax_all, reduced_minmax, respects_tcs, tcs_restriction, MinmaxEntry};
pub use simulate::{simulate_on_path, Period};
pub use values::{continuation_values, solve_discounted, Values};

/// Automaton with floating-point weights and payoffs.
pub type Automaton = ProcessAutomaton<f64>;
/// Automaton with exact rational weights and payoffs.
pub type ExactAutomaton = ProcessAutomaton<market_core::BigRational>;
