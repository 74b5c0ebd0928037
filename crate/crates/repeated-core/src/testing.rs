//! Random automata for consistency tests.

use market_core::{HospitalId, Matching, Scalar};
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::{Lottery, ProcessAutomaton, State};

/// An automaton whose states draw one or two matchings from `pool` and move
/// to random states on path, after deviations and by default. Weights are
/// dyadic so exact scalars see the same lottery as floats.
pub fn random_automaton<S: Scalar, R: Rng + ?Sized>(
    pool: &[Matching],
    num_hospitals: usize,
    num_states: usize,
    discount: S,
    rng: &mut R,
) -> ProcessAutomaton<S> {
    assert!(!pool.is_empty() && num_states > 0);
    let mut a = ProcessAutomaton::new("random", discount);
    let half = S::from_f64_lossy(0.5);
    let pick_state = |rng: &mut R| -> Lottery<usize, S> {
        if rng.random_bool(0.3) {
            let (x, y) = (rng.random_range(0..num_states), rng.random_range(0..num_states));
            Lottery::new(vec![(x, half.clone()), (y, half.clone())]).expect("dyadic weights")
        } else {
            Lottery::point(rng.random_range(0..num_states))
        }
    };
    for s in 0..num_states {
        let first = pool.choose(rng).expect("nonempty pool").clone();
        let r0 = a.add_realization(format!("m{}", a.realizations.len()), 0, first);
        let output = if rng.random_bool(0.3) {
            let second = pool.choose(rng).expect("nonempty pool").clone();
            let r1 = a.add_realization(format!("m{}", a.realizations.len()), 0, second);
            Lottery::new(vec![(r0, half.clone()), (r1, half.clone())]).expect("dyadic weights")
        } else {
            Lottery::point(r0)
        };
        let mut state = State::new(format!("s{s}"), output, pick_state(rng));
        if rng.random_bool(0.7) {
            state.deviation_any = Some(pick_state(rng));
        }
        for f in 0..num_hospitals {
            if rng.random_bool(0.3) {
                state.deviation.push((HospitalId(f), pick_state(rng)));
            }
        }
        if rng.random_bool(0.5) {
            state.default = Some(pick_state(rng));
        }
        a.add_state(state);
    }
    a.initial = Lottery::point(0);
    a
}
