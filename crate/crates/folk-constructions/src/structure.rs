//! Structural checks run on every constructed automaton before the checker.

use market_core::{MarketSpec, Scalar};
use repeated_core::{respects_tcs, ProcessAutomaton};
use static_algorithms::top_coalition_sequence;

use crate::FolkError;

/// Every realization some state can output must be student-IR and, when
/// `keep_tcs` is set, keep each top coalition hospital with its group.
pub fn check_outputs<S: Scalar>(
    cohorts: &[MarketSpec<S>],
    a: &ProcessAutomaton<S>,
    keep_tcs: bool,
) -> Result<(), FolkError> {
    a.validate(cohorts)?;
    let mut used = vec![false; a.realizations.len()];
    for state in &a.states {
        for r in state.output.support() {
            used[*r] = true;
        }
    }
    let tcs: Vec<_> = if keep_tcs { cohorts.iter().map(top_coalition_sequence).collect() } else { Vec::new() };
    for real in a.realizations.iter().zip(&used).filter(|(_, u)| **u).map(|(r, _)| r) {
        let spec = &cohorts[real.cohort];
        if spec.students().any(|w| real.matching.assignment(w).is_some_and(|f| !spec.is_acceptable(w, f))) {
            return Err(FolkError::Input(format!("output {} is not individually rational for students", real.name)));
        }
        if keep_tcs && !respects_tcs(&tcs[real.cohort], &real.matching) {
            return Err(FolkError::Input(format!("output {} breaks the top coalition sequence", real.name)));
        }
    }
    Ok(())
}
