//! On-path simulation of an automaton.

use market_core::Scalar;
use rand::Rng;

use crate::ProcessAutomaton;

/// One simulated period: the state visited and the realization it drew.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Period {
    pub state: usize,
    pub realization: usize,
}

/// Follows the process for `periods` periods with every recommendation
/// played as drawn.
pub fn simulate_on_path<S: Scalar, R: Rng + ?Sized>(a: &ProcessAutomaton<S>, periods: usize, rng: &mut R) -> Vec<Period> {
    let mut out = Vec::with_capacity(periods);
    let mut state = *a.initial.sample_with(rng.random());
    for _ in 0..periods {
        let realization = *a.states[state].output.sample_with(rng.random());
        out.push(Period { state, realization });
        state = *a.states[state].onpath.sample_with(rng.random());
    }
    out
}
