//! Shared state layout of the folk and capacity automata.
//!
//! State 0 is the normal regime. Each punishable hospital `f` owns a reward
//! regime, entered after its punishment, and a chain of `length` punishment
//! states. Each regime is a single state whose output lottery is the regime's
//! lottery; since deviation rows are per state and per hospital, this is the
//! same process as one state per (regime, matching) pair.

use market_core::{HospitalId, Scalar};
use repeated_core::{Lottery, ProcessAutomaton, State};

use crate::FolkError;

pub struct Regimes<S> {
    pub normal: Lottery<usize, S>,
    /// `(f, reward lottery, punishment lottery)` per punishable hospital.
    pub hospitals: Vec<(HospitalId, String, Lottery<usize, S>, Lottery<usize, S>)>,
    pub length: usize,
}

pub fn normal_state() -> usize {
    0
}

pub fn reward_state(i: usize) -> usize {
    1 + i
}

pub fn punishment_state(hospitals: usize, length: usize, i: usize, t: usize) -> usize {
    1 + hospitals + i * length + t
}

pub fn assemble<S: Scalar>(a: &mut ProcessAutomaton<S>, regimes: Regimes<S>) -> Result<(), FolkError> {
    if regimes.length == 0 {
        return Err(FolkError::Input("punishment length must be positive".into()));
    }
    if !a.states.is_empty() {
        return Err(FolkError::Input("automaton already has states".into()));
    }
    let n = regimes.hospitals.len();
    let len = regimes.length;
    let rows: Vec<(HospitalId, Lottery<usize, S>)> = regimes
        .hospitals
        .iter()
        .enumerate()
        .map(|(i, (f, ..))| (*f, Lottery::point(punishment_state(n, len, i, 0))))
        .collect();
    let with_rows = |mut st: State<S>, here: usize| {
        st.deviation = rows.clone();
        st.default = Some(Lottery::point(here));
        st
    };
    a.add_state(with_rows(State::new("normal", regimes.normal, Lottery::point(0)), 0));
    for (i, (_, name, reward, _)) in regimes.hospitals.iter().enumerate() {
        let s = reward_state(i);
        a.add_state(with_rows(State::new(format!("reward_{name}"), reward.clone(), Lottery::point(s)), s));
    }
    for (i, (_, name, _, punish)) in regimes.hospitals.iter().enumerate() {
        for t in 0..len {
            let next = if t + 1 == len { reward_state(i) } else { punishment_state(n, len, i, t + 1) };
            let st = State::new(format!("punish_{name}_{t}"), punish.clone(), Lottery::point(next));
            // Unattributable changes move on like compliance.
            a.add_state(with_rows(st, next));
        }
    }
    a.initial = Lottery::point(normal_state());
    Ok(())
}
