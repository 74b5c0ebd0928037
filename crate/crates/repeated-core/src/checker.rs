//! One-shot deviation check: at every state and every drawn recommendation,
//! students must accept their assignment and no hospital may gain by
//! hiring a feasible set of its available students for one period.

use market_core::{for_each_subset, HospitalId, MarketSpec, Matching, Scalar, StudentId};
use rayon::prelude::*;

use crate::values::{continuation_values, realization_payoffs, Values};
use crate::{ProcessAutomaton, ProcessError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ScanMode {
    /// One candidate set per hospital: its best deviation under additivity.
    #[default]
    Pruned,
    /// Every feasible set, each routed through [`ProcessAutomaton::transition`].
    BruteForce,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness<S> {
    /// A student placed at a hospital she finds unacceptable.
    Student { state: usize, realization: usize, student: StudentId, hospital: HospitalId },
    /// A profitable one-period deviation.
    Hospital {
        state: usize,
        realization: usize,
        hospital: HospitalId,
        students: Vec<StudentId>,
        gain: S,
        deviation_value: S,
        compliance_value: S,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<S> {
    pub witness: Option<Witness<S>>,
}

impl<S> Verdict<S> {
    pub fn is_self_enforcing(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn check_self_enforcing<S: Scalar>(
    spec: &MarketSpec<S>,
    a: &ProcessAutomaton<S>,
) -> Result<Verdict<S>, ProcessError> {
    check_self_enforcing_cohorts(std::slice::from_ref(spec), a, ScanMode::Pruned)
}

/// Scans states in index order, then each state's output realizations, then
/// student participation, then hospitals by id. The first violation found
/// in that order is reported, whatever the thread count.
pub fn check_self_enforcing_cohorts<S: Scalar>(
    cohorts: &[MarketSpec<S>],
    a: &ProcessAutomaton<S>,
    mode: ScanMode,
) -> Result<Verdict<S>, ProcessError> {
    let values = continuation_values(cohorts, a)?;
    let payoffs = realization_payoffs(cohorts, a);
    let h = cohorts[0].num_hospitals();
    let best: Vec<Realized<S>> = a
        .realizations
        .par_iter()
        .map(|r| {
            let spec = &cohorts[r.cohort];
            Realized {
                ir_violation: ir_violation(spec, &r.matching),
                best: match mode {
                    ScanMode::Pruned => spec.hospitals().map(|f| best_deviation(spec, &r.matching, f)).collect(),
                    ScanMode::BruteForce => Vec::new(),
                },
            }
        })
        .collect();
    let ctx = Context { cohorts, a, values: &values, payoffs: &payoffs, realized: &best, h, mode };
    let witness = (0..a.num_states()).into_par_iter().find_map_first(|s| ctx.scan_state(s));
    Ok(Verdict { witness })
}

struct Realized<S> {
    ir_violation: Option<(StudentId, HospitalId)>,
    best: Vec<Option<(Vec<StudentId>, S)>>,
}

struct Context<'a, S> {
    cohorts: &'a [MarketSpec<S>],
    a: &'a ProcessAutomaton<S>,
    values: &'a Values<S>,
    payoffs: &'a [Vec<S>],
    realized: &'a [Realized<S>],
    h: usize,
    mode: ScanMode,
}

impl<S: Scalar> Context<'_, S> {
    fn scan_state(&self, s: usize) -> Option<Witness<S>> {
        let a = self.a;
        let delta = &a.discount;
        let keep = S::one() - delta.clone();
        let state = &a.states[s];
        let onpath: Vec<S> =
            (0..self.h).map(|f| state.onpath.expectation(|t| self.values.state(*t)[f].clone())).collect();
        let after_deviation: Vec<S> = (0..self.h)
            .map(|f| a.deviation_transition(s, HospitalId(f)).expectation(|t| self.values.state(t)[f].clone()))
            .collect();
        for &r in state.output.support() {
            if let Some((student, hospital)) = self.realized[r].ir_violation {
                return Some(Witness::Student { state: s, realization: r, student, hospital });
            }
            let spec = &self.cohorts[a.realizations[r].cohort];
            let m = &a.realizations[r].matching;
            for f in spec.hospitals() {
                let compliance = keep.clone() * self.payoffs[r][f.0].clone() + delta.clone() * onpath[f.0].clone();
                let candidate = match self.mode {
                    ScanMode::Pruned => self.realized[r].best[f.0].as_ref().map(|(w, u)| {
                        (w.clone(), keep.clone() * u.clone() + delta.clone() * after_deviation[f.0].clone())
                    }),
                    ScanMode::BruteForce => self.brute_best(spec, s, r, m, f),
                };
                if let Some((students, deviation)) = candidate {
                    let gain = deviation.clone() - compliance.clone();
                    if gain > S::payoff_tolerance() {
                        return Some(Witness::Hospital {
                            state: s,
                            realization: r,
                            hospital: f,
                            students,
                            gain,
                            deviation_value: deviation,
                            compliance_value: compliance,
                        });
                    }
                }
            }
        }
        None
    }

    fn brute_best(
        &self,
        spec: &MarketSpec<S>,
        s: usize,
        r: usize,
        m: &Matching,
        f: HospitalId,
    ) -> Option<(Vec<StudentId>, S)> {
        let delta = &self.a.discount;
        let keep = S::one() - delta.clone();
        let available = spec.available_set(f, m);
        let mut best: Option<(Vec<StudentId>, S)> = None;
        let mut consider = |set: &[StudentId]| {
            if set == m.members(f) {
                return;
            }
            let realized = spec.apply_deviation(m, f, set).expect("feasible deviation");
            let next = self.a.transition(self.cohorts, s, r, &realized);
            let value = keep.clone() * spec.utility_of(f, set)
                + delta.clone() * next.expectation(|t| self.values.state(t)[f.0].clone());
            if best.as_ref().is_none_or(|(_, v)| value > *v) {
                best = Some((set.to_vec(), value));
            }
        };
        consider(&[]);
        for_each_subset(&available, spec.quota(f), consider);
        best
    }
}

fn ir_violation<S: Scalar>(spec: &MarketSpec<S>, m: &Matching) -> Option<(StudentId, HospitalId)> {
    spec.students().find_map(|w| m.assignment(w).filter(|f| !spec.is_acceptable(w, *f)).map(|f| (w, f)))
}

/// The most valuable feasible roster for `f` other than its current one, with
/// its stage utility. Under additive utilities this is the best response, or,
/// when the best response is the current roster, that roster with its least
/// valued member swapped for the best available outsider or dropped.
pub fn best_deviation<S: Scalar>(spec: &MarketSpec<S>, m: &Matching, f: HospitalId) -> Option<(Vec<StudentId>, S)> {
    let (top, value) = spec.best_response(f, m);
    if top.as_slice() != m.members(f) {
        return Some((top, value));
    }
    let worst = *top.iter().min_by(|a, b| spec.utility(f, **a).partial_cmp(spec.utility(f, **b)).expect("comparable"))?;
    let base = value - spec.utility(f, worst).clone();
    let outsider = spec.available_ranked(f, m).into_iter().find(|w| !top.contains(w));
    let mut set: Vec<StudentId> = top.into_iter().filter(|w| *w != worst).collect();
    let value = match outsider {
        Some(w) => {
            set.push(w);
            set.sort();
            base + spec.utility(f, w).clone()
        }
        None => base,
    };
    Some((set, value))
}
