//! Matching processes as finite automata whose states emit lotteries over
//! stage matchings and move according to what was actually played.

use market_core::{Attribution, HospitalId, Matching, MarketSpec, Scalar};

use crate::{Lottery, ProcessError};

/// A stage matching in a given student cohort. Cohorts share hospitals and
/// differ in their students' draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub name: String,
    pub cohort: usize,
    pub matching: Matching,
}

/// One automaton state. Transition rows are lotteries over state indices.
#[derive(Clone, Debug, PartialEq)]
pub struct State<S> {
    pub name: String,
    /// Lottery over realization indices.
    pub output: Lottery<usize, S>,
    /// Used when the drawn recommendation is played.
    pub onpath: Lottery<usize, S>,
    /// Used when the named hospital is identified as the deviator.
    pub deviation: Vec<(HospitalId, Lottery<usize, S>)>,
    /// Used for identified deviators without their own row.
    pub deviation_any: Option<Lottery<usize, S>>,
    /// Used for anything else; absent means stay put.
    pub default: Option<Lottery<usize, S>>,
}

impl<S: Scalar> State<S> {
    /// A state with only an output and an on-path row.
    pub fn new(name: impl Into<String>, output: Lottery<usize, S>, onpath: Lottery<usize, S>) -> Self {
        State { name: name.into(), output, onpath, deviation: Vec::new(), deviation_any: None, default: None }
    }

    pub fn deviation_row(&self, f: HospitalId) -> Option<&Lottery<usize, S>> {
        self.deviation.iter().find(|(g, _)| *g == f).map(|(_, l)| l).or(self.deviation_any.as_ref())
    }
}

/// Where the process goes after a realized stage matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transition<'a, S> {
    OnPath(&'a Lottery<usize, S>),
    Deviation(HospitalId, &'a Lottery<usize, S>),
    Default(&'a Lottery<usize, S>),
    Stay(usize),
}

impl<S: Scalar> Transition<'_, S> {
    /// Expected value of `value` over the next state.
    pub fn expectation(&self, mut value: impl FnMut(usize) -> S) -> S {
        match self {
            Transition::OnPath(l) | Transition::Deviation(_, l) | Transition::Default(l) => l.expectation(|s| value(*s)),
            Transition::Stay(s) => value(*s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessAutomaton<S> {
    pub name: String,
    pub realizations: Vec<Realization>,
    pub states: Vec<State<S>>,
    pub initial: Lottery<usize, S>,
    pub discount: S,
}

impl<S: Scalar> ProcessAutomaton<S> {
    /// An automaton with no states yet; the initial lottery defaults to the
    /// first state added.
    pub fn new(name: impl Into<String>, discount: S) -> Self {
        ProcessAutomaton {
            name: name.into(),
            realizations: Vec::new(),
            states: Vec::new(),
            initial: Lottery::point(0),
            discount,
        }
    }

    pub fn with_discount(mut self, discount: S) -> Self {
        self.discount = discount;
        self
    }

    /// Index of the realization, adding it under `name` if no realization with
    /// the same cohort and matching exists yet.
    pub fn add_realization(&mut self, name: impl Into<String>, cohort: usize, matching: Matching) -> usize {
        if let Some(i) = self.realizations.iter().position(|r| r.cohort == cohort && r.matching == matching) {
            return i;
        }
        self.realizations.push(Realization { name: name.into(), cohort, matching });
        self.realizations.len() - 1
    }

    pub fn add_state(&mut self, state: State<S>) -> usize {
        self.states.push(state);
        self.states.len() - 1
    }

    pub fn state_by_name(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn realization_by_name(&self, name: &str) -> Option<usize> {
        self.realizations.iter().position(|r| r.name == name)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Checks indices, lotteries, the discount factor and every realization
    /// against its cohort market.
    pub fn validate(&self, cohorts: &[MarketSpec<S>]) -> Result<(), ProcessError> {
        if self.discount < S::zero() || self.discount >= S::one() {
            return Err(ProcessError::Discount(self.discount.to_string()));
        }
        if cohorts.iter().skip(1).any(|c| !c.same_players(&cohorts[0])) {
            return Err(ProcessError::CohortMismatch);
        }
        for r in &self.realizations {
            let spec = cohorts.get(r.cohort).ok_or_else(|| ProcessError::CohortOutOfRange {
                realization: r.name.clone(),
                cohort: r.cohort,
                cohorts: cohorts.len(),
            })?;
            r.matching
                .validate(spec)
                .map_err(|source| ProcessError::InvalidRealization { realization: r.name.clone(), source })?;
        }
        if self.states.is_empty() {
            return Err(ProcessError::Precondition("automaton has no states".into()));
        }
        let n = self.states.len();
        let check_states = |l: &Lottery<usize, S>| match l.support().find(|s| **s >= n) {
            Some(s) => Err(ProcessError::UnknownState(*s)),
            None => Ok(()),
        };
        check_states(&self.initial)?;
        for state in &self.states {
            if let Some(r) = state.output.support().find(|r| **r >= self.realizations.len()) {
                return Err(ProcessError::Lottery(format!("state {} outputs unknown realization {r}", state.name)));
            }
            check_states(&state.onpath)?;
            for (f, l) in &state.deviation {
                cohorts[0].check_hospital(*f)?;
                check_states(l)?;
            }
            if let Some(l) = &state.deviation_any {
                check_states(l)?;
            }
            if let Some(l) = &state.default {
                check_states(l)?;
            }
        }
        Ok(())
    }

    /// The transition out of state `s` after recommendation `r` was drawn and
    /// `realized` was played in that cohort.
    pub fn transition(
        &self,
        cohorts: &[MarketSpec<S>],
        s: usize,
        r: usize,
        realized: &Matching,
    ) -> Transition<'_, S> {
        let state = &self.states[s];
        let drawn = &self.realizations[r];
        match cohorts[drawn.cohort].identify_deviator(&drawn.matching, realized) {
            Attribution::Unchanged => Transition::OnPath(&state.onpath),
            Attribution::Hospital(f) => self.deviation_transition(s, f),
            Attribution::Unattributable => match &state.default {
                Some(l) => Transition::Default(l),
                None => Transition::Stay(s),
            },
        }
    }

    /// The transition after an identified deviation by `f`.
    pub fn deviation_transition(&self, s: usize, f: HospitalId) -> Transition<'_, S> {
        let state = &self.states[s];
        match (state.deviation_row(f), &state.default) {
            (Some(l), _) => Transition::Deviation(f, l),
            (None, Some(l)) => Transition::Default(l),
            (None, None) => Transition::Stay(s),
        }
    }
}

/// Repeats `m` forever: one absorbing state whose rows all loop back.
pub fn stationary_process<S: Scalar>(
    spec: &MarketSpec<S>,
    m: &Matching,
    discount: S,
) -> Result<ProcessAutomaton<S>, ProcessError> {
    m.validate(spec)?;
    let mut a = ProcessAutomaton::new("stationary", discount);
    let r = a.add_realization("m", 0, m.clone());
    let mut state = State::new("repeat", Lottery::point(r), Lottery::point(0));
    state.default = Some(Lottery::point(0));
    a.add_state(state);
    Ok(a)
}
