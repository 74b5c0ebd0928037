//! Audit of a process against elite hospitals that hire below quota.
//!
//! At every state and output where an elite (tier 1) hospital is short of its
//! quota, three deviations are priced against compliance:
//!
//! * one period with the best top-tier student not at an elite hospital
//!   added to the roster, then back on the process;
//! * a standing plan: every period hire the best `q` top-tier students who
//!   rank the hospital first and are worth more than `V(C₁, 1) − ε̃`,
//!   going on path whenever that is the recommended roster;
//! * the add-on now, then the standing plan.
//!
//! `gain` is the best of these minus the compliance value. A positive gain
//! certifies that the process is not self-enforcing for that hospital.

use large_market::RealizedMarket;
use market_core::{HospitalId, Market, StudentId};
use rayon::prelude::*;
use repeated_core::{continuation_values, solve_discounted, Automaton, Transition};

use crate::FolkError;

#[derive(Clone, Debug, PartialEq)]
pub struct AuditEntry {
    pub state: usize,
    pub realization: usize,
    pub hospital: HospitalId,
    pub roster: usize,
    pub compliance: f64,
    /// The added student and the value of adding it for one period.
    pub add_on: Option<(StudentId, f64)>,
    pub plan: f64,
    pub add_on_then_plan: Option<f64>,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub discount: f64,
    pub epsilon_tilde: f64,
    /// `(1 − δ) / (2δ) · V(C₁, 0)`.
    pub slack: f64,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all_positive(&self) -> bool {
        self.entries.iter().all(|e| e.gain > 0.0)
    }

    pub fn min_gain(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.gain).reduce(f64::min)
    }
}

fn next_row(t: Transition<'_, f64>) -> Vec<(usize, f64)> {
    match t {
        Transition::OnPath(l) | Transition::Deviation(_, l) | Transition::Default(l) => l.entries().to_vec(),
        Transition::Stay(s) => vec![(s, 1.0)],
    }
}

pub fn elite_deviation_audit(
    cohorts: &[RealizedMarket],
    process: &Automaton,
    discount: f64,
    epsilon_tilde: f64,
) -> Result<AuditReport, FolkError> {
    let first = cohorts.first().ok_or_else(|| FolkError::Input("at least one cohort is required".into()))?;
    let elite = first.hospitals_in(1);
    if elite.is_empty() {
        return Err(FolkError::Input("no elite hospital tier at this size".into()));
    }
    let top = first.students_in(1);
    let seats: usize = elite.iter().map(|f| first.spec.quota(*f)).sum();
    if top.len() <= seats {
        return Err(FolkError::Input(format!(
            "the elite tier needs more top-tier students than its {seats} seats, found {}",
            top.len()
        )));
    }
    if !(epsilon_tilde > 0.0) {
        return Err(FolkError::Input("epsilon must be positive".into()));
    }
    let a = process.clone().with_discount(discount);
    let specs: Vec<Market> = cohorts.iter().map(|c| c.spec.clone()).collect();
    let values = continuation_values(&specs, &a)?;
    let c1 = first.common_values[0];
    let threshold = c1 + 1.0 - epsilon_tilde;
    let d = discount;

    let entries: Vec<Vec<AuditEntry>> = elite
        .par_iter()
        .map(|&f| {
            let q = first.spec.quota(f);
            let utility = |r: usize, ws: &[StudentId]| specs[a.realizations[r].cohort].utility_of(f, ws);
            // The plan's roster in each realization's cohort.
            let plan_roster: Vec<Vec<StudentId>> = a
                .realizations
                .iter()
                .map(|real| {
                    let c = &cohorts[real.cohort];
                    let mut eager: Vec<StudentId> = c
                        .students_in(1)
                        .into_iter()
                        .filter(|w| c.spec.acceptable(*w).first() == Some(&f) && *c.spec.utility(f, *w) > threshold)
                        .collect();
                    eager.sort_by(|x, y| c.spec.utility(f, *y).total_cmp(c.spec.utility(f, *x)));
                    eager.truncate(q);
                    eager.sort();
                    eager
                })
                .collect();
            let plan_move = |s: usize, r: usize| {
                if plan_roster[r] == a.realizations[r].matching.members(f) {
                    a.states[s].onpath.entries().to_vec()
                } else {
                    next_row(a.deviation_transition(s, f))
                }
            };
            let mut rows = Vec::with_capacity(a.num_states());
            let mut rewards = Vec::with_capacity(a.num_states());
            for (s, st) in a.states.iter().enumerate() {
                let mut row: Vec<(usize, f64)> = Vec::new();
                let mut reward = 0.0;
                for (r, w) in st.output.iter() {
                    reward += w * utility(*r, &plan_roster[*r]);
                    for (t, p) in plan_move(s, *r) {
                        match row.iter_mut().find(|(u, _)| *u == t) {
                            Some((_, x)) => *x += w * p,
                            None => row.push((t, w * p)),
                        }
                    }
                }
                rows.push(row);
                rewards.push(vec![reward]);
            }
            let plan_value: Vec<f64> = solve_discounted(&rows, &rewards, &d).into_iter().map(|v| v[0]).collect();
            let expect = |row: &[(usize, f64)], v: &dyn Fn(usize) -> f64| row.iter().map(|(t, p)| p * v(*t)).sum::<f64>();
            let value = |t: usize| *values.get(t, f);
            let planned = |t: usize| plan_value[t];

            let mut out = Vec::new();
            for (s, st) in a.states.iter().enumerate() {
                let onpath = st.onpath.entries().to_vec();
                let deviation = next_row(a.deviation_transition(s, f));
                for &r in st.output.support() {
                    let real = &a.realizations[r];
                    let roster = real.matching.members(f);
                    if roster.len() >= q {
                        continue;
                    }
                    let c = &cohorts[real.cohort];
                    let stage = utility(r, roster);
                    let compliance = (1.0 - d) * stage + d * expect(&onpath, &value);
                    let pick = c
                        .students_in(1)
                        .into_iter()
                        .filter(|w| real.matching.assignment(*w).is_none_or(|g| c.hospital_tier[g.0] != 1))
                        .max_by(|x, y| c.spec.utility(f, *x).total_cmp(c.spec.utility(f, *y)));
                    let add_on = pick.map(|w| {
                        let bonus = (1.0 - d) * (stage + c.spec.utility(f, w));
                        (w, bonus + d * expect(&deviation, &value), bonus + d * expect(&deviation, &planned))
                    });
                    let plan = (1.0 - d) * utility(r, &plan_roster[r]) + d * expect(&plan_move(s, r), &planned);
                    let best = add_on.iter().flat_map(|(_, x, y)| [*x, *y]).fold(plan, f64::max);
                    out.push(AuditEntry {
                        state: s,
                        realization: r,
                        hospital: f,
                        roster: roster.len(),
                        compliance,
                        add_on: add_on.map(|(w, x, _)| (w, x)),
                        plan,
                        add_on_then_plan: add_on.map(|(_, _, y)| y),
                        gain: best - compliance,
                    });
                }
            }
            out
        })
        .collect();
    let mut entries: Vec<AuditEntry> = entries.into_iter().flatten().collect();
    entries.sort_by_key(|e| (e.state, e.realization, e.hospital));
    Ok(AuditReport { discount: d, epsilon_tilde, slack: (1.0 - d) / (2.0 * d) * c1, entries })
}
