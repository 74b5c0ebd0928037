use market_core::{MarketSpec, Scalar};
use static_algorithms::top_coalition_sequence;

use crate::checker::{check_self_enforcing_cohorts, ScanMode};
use crate::minmax::respects_tcs;
use crate::{ProcessAutomaton, ProcessError};

/// For a self-enforcing automaton, whether every output realization keeps
/// each top coalition hospital with exactly its group. The theory says this
/// always holds, so a `false` flags a bug somewhere.
pub fn verify_top_coalition_lock<S: Scalar>(spec: &MarketSpec<S>, a: &ProcessAutomaton<S>) -> Result<bool, ProcessError> {
    verify_top_coalition_lock_cohorts(std::slice::from_ref(spec), a)
}

pub fn verify_top_coalition_lock_cohorts<S: Scalar>(
    cohorts: &[MarketSpec<S>],
    a: &ProcessAutomaton<S>,
) -> Result<bool, ProcessError> {
    if !check_self_enforcing_cohorts(cohorts, a, ScanMode::Pruned)?.is_self_enforcing() {
        return Err(ProcessError::Precondition("automaton is not self-enforcing".into()));
    }
    let sequences: Vec<_> = cohorts.iter().map(top_coalition_sequence).collect();
    Ok(a.states.iter().flat_map(|s| s.output.support()).all(|&r| {
        let real = &a.realizations[r];
        respects_tcs(&sequences[real.cohort], &real.matching)
    }))
}
