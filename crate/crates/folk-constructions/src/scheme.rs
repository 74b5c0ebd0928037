//! Player-specific punishments: for each hospital outside the top coalition
//! sequence a lottery `λᶠ` over the TCS-respecting student-IR matchings with
//!
//! * `u_f(λᶠ) < u_f(λ⁰)`,
//! * `u_f(λᶠ) < u_f(λ^{f'})` for every other punishable `f'`,
//! * `u_f(λᶠ)` above `f`'s reduced minmax value.
//!
//! Each `λᶠ` mixes `λ⁰` with one matching `ν_f` at weight `a_f`. Candidate
//! tuples `(ν_f)` are visited by backtracking, starting from the minmax
//! matchings; for each, the weights are halved until every inequality
//! holds. The result is a certificate: the inequalities are re-verified
//! before it is returned, and with a discount factor given, the checker
//! has accepted the resulting automaton.

use market_core::scalar::exceeds;
use market_core::{enumerate_ir_matchings, EnumerationCap, HospitalId, Matching, MarketSpec, Scalar};
use repeated_core::{check_self_enforcing, respects_tcs, tcs_restriction, Lottery};
use static_algorithms::top_coalition_sequence;

use crate::{build_folk_automaton, FolkError};

#[derive(Clone, Debug, PartialEq)]
pub struct Punishment<S> {
    pub hospital: HospitalId,
    /// `λᶠ`.
    pub lottery: Lottery<Matching, S>,
    /// The matching mixed into `λ⁰` to form `λᶠ`.
    pub nu: Matching,
    /// Weight of `nu` in `λᶠ`.
    pub weight: S,
    /// Output of the punishment phase: attains the reduced minmax value with
    /// `f` holding a best response.
    pub minmax: Matching,
    pub minmax_value: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PunishmentScheme<S> {
    pub target: Lottery<Matching, S>,
    /// One entry per punishable hospital, by id. Empty when every hospital
    /// is in the top coalition sequence.
    pub hospitals: Vec<Punishment<S>>,
    pub punishment_length: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeOptions<S> {
    /// Candidate assignments the backtracking may visit.
    pub budget: usize,
    /// Overrides the sizing rule for the punishment length.
    pub punishment_length: Option<usize>,
    pub cap: EnumerationCap,
    /// When set, only schemes whose folk automaton the checker accepts at
    /// this discount factor are returned.
    pub discount: Option<S>,
}

impl<S> Default for SchemeOptions<S> {
    fn default() -> Self {
        SchemeOptions { budget: 1_000_000, punishment_length: None, cap: EnumerationCap::default(), discount: None }
    }
}

const HALVINGS: usize = 64;
const SCALINGS: usize = 8;
/// Longest punishment phase tried when searching against a discount factor.
pub const MAX_LENGTH: usize = 64;

pub fn lottery_value<S: Scalar>(spec: &MarketSpec<S>, f: HospitalId, l: &Lottery<Matching, S>) -> S {
    l.expectation(|m| spec.utility_of(f, m.members(f)))
}

impl<S: Scalar> PunishmentScheme<S> {
    pub fn punishment(&self, f: HospitalId) -> Option<&Punishment<S>> {
        self.hospitals.iter().find(|p| p.hospital == f)
    }

    /// Re-checks the three inequality families, with the payoff tolerance as
    /// margin.
    pub fn verify(&self, spec: &MarketSpec<S>) -> Result<(), FolkError> {
        let tol = S::payoff_tolerance();
        for p in &self.hospitals {
            let f = p.hospital;
            let own = lottery_value(spec, f, &p.lottery);
            if !exceeds(&lottery_value(spec, f, &self.target), &own, &tol) {
                return Err(FolkError::Input(format!("{} is not punished below the target", spec.hospital_name(f))));
            }
            if !exceeds(&own, &p.minmax_value, &tol) {
                return Err(FolkError::Input(format!("{} is pushed to its minmax value", spec.hospital_name(f))));
            }
            for q in self.hospitals.iter().filter(|q| q.hospital != f) {
                if !exceeds(&lottery_value(spec, f, &q.lottery), &own, &tol) {
                    return Err(FolkError::Input(format!(
                        "{} prefers its own punishment to that of {}",
                        spec.hospital_name(f),
                        spec.hospital_name(q.hospital)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Largest stage payoff `f` could ever get: its best `q` acceptable students.
fn best_stage_payoff<S: Scalar>(spec: &MarketSpec<S>, f: HospitalId) -> S {
    let willing: Vec<_> = spec.ranked_students(f).iter().filter(|w| spec.is_acceptable(**w, f)).collect();
    market_core::scalar::sum(willing.into_iter().take(spec.quota(f)).map(|w| spec.utility(f, *w).clone()))
}

/// Smallest `L` with `L · min_f (u_f(λᶠ) − u̲_f) > Z − (lowest stage payoff)`,
/// where `Z` is one more than the best stage payoff of any hospital.
pub fn default_punishment_length<S: Scalar>(spec: &MarketSpec<S>, scheme: &PunishmentScheme<S>) -> usize {
    if scheme.hospitals.is_empty() {
        return 1;
    }
    let z = spec.hospitals().map(|f| best_stage_payoff(spec, f)).fold(S::zero(), |a, b| if b > a { b } else { a })
        + S::one();
    let mut lowest: Option<S> = None;
    let mut margin: Option<S> = None;
    for p in &scheme.hospitals {
        let f = p.hospital;
        let outputs = scheme
            .target
            .support()
            .chain(scheme.hospitals.iter().flat_map(|q| q.lottery.support()))
            .chain(std::iter::once(&p.minmax));
        for m in outputs {
            let u = spec.utility_of(f, m.members(f));
            if lowest.as_ref().is_none_or(|l| u < *l) {
                lowest = Some(u);
            }
        }
        let gap = lottery_value(spec, f, &p.lottery) - p.minmax_value.clone();
        if margin.as_ref().is_none_or(|g| gap < *g) {
            margin = Some(gap);
        }
    }
    let (lowest, margin) = (lowest.unwrap(), margin.unwrap());
    let need = z - lowest;
    let mut l = 1usize;
    let mut total = margin.clone();
    while total <= need {
        l += 1;
        total = total + margin.clone();
    }
    l
}

pub fn find_player_specific_punishments<S: Scalar>(
    spec: &MarketSpec<S>,
    target: &Lottery<Matching, S>,
    opts: SchemeOptions<S>,
) -> Result<PunishmentScheme<S>, FolkError> {
    let tol = S::payoff_tolerance();
    let tcs = top_coalition_sequence(spec);
    for m in target.support() {
        m.validate(spec)?;
        if spec.students().any(|w| m.assignment(w).is_some_and(|f| !spec.is_acceptable(w, f))) {
            return Err(FolkError::Input("the target lottery puts weight on a matching that is not student-IR".into()));
        }
        if !respects_tcs(&tcs, m) {
            return Err(FolkError::Input("the target lottery breaks the top coalition sequence".into()));
        }
    }
    let free: Vec<HospitalId> = spec.hospitals().filter(|f| !tcs.contains_hospital(*f)).collect();
    if free.is_empty() {
        return Ok(PunishmentScheme {
            target: target.clone(),
            hospitals: Vec::new(),
            punishment_length: 1,
        });
    }

    let pool = enumerate_ir_matchings(spec, &tcs_restriction(&tcs), opts.cap)?;
    let stage = |f: HospitalId, m: &Matching| spec.utility_of(f, m.members(f));
    let target_value: Vec<S> = free.iter().map(|f| lottery_value(spec, *f, target)).collect();

    // Reduced minmax value and, among its minimizers, one where f already
    // holds its best response, so complying costs it nothing in the stage.
    // Swapping a minimizer's roster for f's best response stays in the pool
    // and cannot raise the best-response value, so such a minimizer exists.
    let mut minmax: Vec<(S, usize)> = Vec::with_capacity(free.len());
    for &f in &free {
        let br: Vec<S> = pool.iter().map(|m| spec.best_response(f, m).1).collect();
        let low = br.iter().fold(br[0].clone(), |a, b| if *b < a { b.clone() } else { a });
        let pick = (0..pool.len())
            .filter(|&i| !exceeds(&br[i], &low, &tol))
            .max_by(|&i, &j| stage(f, &pool[i]).partial_cmp(&stage(f, &pool[j])).expect("comparable").then(j.cmp(&i)))
            .expect("the minimum is attained");
        minmax.push((low, pick));
    }
    for (i, &f) in free.iter().enumerate() {
        if !exceeds(&target_value[i], &minmax[i].0, &tol) {
            return Err(FolkError::Input(format!(
                "the target gives {} only {}, not above its reduced minmax value {}",
                spec.hospital_name(f),
                target_value[i],
                minmax[i].0
            )));
        }
    }

    // Candidates for ν_f: the minmax matching first, then matchings closer
    // to stable (smaller largest stage gain among punishable hospitals),
    // then by how little f loses relative to the target.
    let stage_gain: Vec<S> = pool
        .iter()
        .map(|m| {
            free.iter()
                .map(|g| spec.best_response(*g, m).1 - stage(*g, m))
                .fold(S::zero(), |a, b| if b > a { b } else { a })
        })
        .collect();
    let candidates: Vec<Vec<usize>> = free
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let mut c: Vec<usize> =
                (0..pool.len()).filter(|&j| exceeds(&target_value[i], &stage(f, &pool[j]), &tol)).collect();
            c.sort_by(|&a, &b| {
                (b == minmax[i].1)
                    .cmp(&(a == minmax[i].1))
                    .then(stage_gain[a].partial_cmp(&stage_gain[b]).expect("comparable"))
                    .then(stage(f, &pool[b]).partial_cmp(&stage(f, &pool[a])).expect("comparable"))
            });
            c
        })
        .collect();
    if let Some(i) = candidates.iter().position(Vec::is_empty) {
        return Err(FolkError::NotFound(format!(
            "no matching pays {} less than the target",
            spec.hospital_name(free[i])
        )));
    }

    let ctx = Search { spec, target, free: &free, pool: &pool, minmax: &minmax, target_value: &target_value, tol };
    let mut budget = opts.budget;
    let mut chosen = Vec::with_capacity(free.len());
    let mut found = None;
    ctx.backtrack(&candidates, &mut chosen, &mut budget, &mut |chosen, budget| {
        let Some(weights) = ctx.weights(chosen) else { return false };
        let scheme = match ctx.scheme(chosen, &weights, 1) {
            Ok(s) => s,
            Err(_) => return false,
        };
        let base = opts.punishment_length.unwrap_or_else(|| default_punishment_length(spec, &scheme));
        let scheme = PunishmentScheme { punishment_length: base, ..scheme };
        match &opts.discount {
            None => {
                found = Some(scheme);
                true
            }
            Some(d) => match ctx.enforceable(scheme, d, opts.punishment_length.is_none(), budget) {
                Some(s) => {
                    found = Some(s);
                    true
                }
                None => false,
            },
        }
    });
    found.ok_or_else(|| {
        FolkError::NotFound(match opts.discount {
            None => format!("no punishment matchings with consistent weights within {} visits", opts.budget),
            Some(d) => format!("no self-enforcing scheme at discount {d} within {} visits", opts.budget),
        })
    })
}

struct Search<'a, S> {
    spec: &'a MarketSpec<S>,
    target: &'a Lottery<Matching, S>,
    free: &'a [HospitalId],
    pool: &'a [Matching],
    minmax: &'a [(S, usize)],
    target_value: &'a [S],
    tol: S,
}

impl<S: Scalar> Search<'_, S> {
    fn stage(&self, i: usize, m: usize) -> S {
        let f = self.free[i];
        self.spec.utility_of(f, self.pool[m].members(f))
    }

    /// Visits every candidate tuple with `u_f(ν_f) < u_f(λ⁰)` until `accept`
    /// returns true or the budget runs out.
    fn backtrack(
        &self,
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        budget: &mut usize,
        accept: &mut dyn FnMut(&[usize], &mut usize) -> bool,
    ) -> bool {
        let i = chosen.len();
        if i == self.free.len() {
            return accept(chosen, budget);
        }
        for &c in &candidates[i] {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            chosen.push(c);
            if self.backtrack(candidates, chosen, budget, accept) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Per-hospital weights on `ν_f`. Starting from one, a weight is halved
    /// whenever it makes another hospital prefer its own punishment, or
    /// pushes its hospital down to the minmax value.
    fn weights(&self, chosen: &[usize]) -> Option<Vec<S>> {
        let n = self.free.len();
        let two = S::one() + S::one();
        // loss[j][i]: what hospital i loses in λ^{f_j} per unit of weight.
        let loss: Vec<Vec<S>> =
            (0..n).map(|j| (0..n).map(|i| self.target_value[i].clone() - self.stage(i, chosen[j])).collect()).collect();
        let mut a = vec![S::one(); n];
        for _ in 0..HALVINGS * n {
            let mut changed = false;
            for i in 0..n {
                let own = a[i].clone() * loss[i][i].clone();
                if !exceeds(&(self.target_value[i].clone() - self.minmax[i].0.clone()), &own, &self.tol) {
                    a[i] = a[i].clone() / two.clone();
                    changed = true;
                    continue;
                }
                for j in (0..n).filter(|j| *j != i) {
                    if !exceeds(&own, &(a[j].clone() * loss[j][i].clone()), &self.tol) {
                        a[j] = a[j].clone() / two.clone();
                        changed = true;
                    }
                }
            }
            if !changed {
                return Some(a);
            }
        }
        None
    }

    fn scheme(&self, chosen: &[usize], weights: &[S], length: usize) -> Result<PunishmentScheme<S>, FolkError> {
        let hospitals = self
            .free
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let nu = self.pool[chosen[i]].clone();
                Ok(Punishment {
                    hospital: f,
                    lottery: Lottery::point(nu.clone()).mix(&weights[i], self.target)?,
                    nu,
                    weight: weights[i].clone(),
                    minmax: self.pool[self.minmax[i].1].clone(),
                    minmax_value: self.minmax[i].0.clone(),
                })
            })
            .collect::<Result<Vec<_>, FolkError>>()?;
        let scheme = PunishmentScheme { target: self.target.clone(), hospitals, punishment_length: length };
        scheme.verify(self.spec)?;
        Ok(scheme)
    }

    /// Tries the scheme with all weights scaled down by powers of two and,
    /// unless fixed, punishment lengths up to [`MAX_LENGTH`], keeping the
    /// first that the checker accepts at `discount`.
    fn enforceable(
        &self,
        scheme: PunishmentScheme<S>,
        discount: &S,
        vary_length: bool,
        budget: &mut usize,
    ) -> Option<PunishmentScheme<S>> {
        let two = S::one() + S::one();
        let mut scale = S::one();
        for _ in 0..SCALINGS {
            let weights: Vec<S> = scheme.hospitals.iter().map(|p| p.weight.clone() * scale.clone()).collect();
            let chosen: Vec<usize> = scheme
                .hospitals
                .iter()
                .map(|p| self.pool.iter().position(|m| *m == p.nu).expect("from the pool"))
                .collect();
            scale = scale / two.clone();
            let Ok(scaled) = self.scheme(&chosen, &weights, scheme.punishment_length) else { continue };
            let lengths: Vec<usize> = if vary_length {
                let base = default_punishment_length(self.spec, &scaled);
                std::iter::once(base).chain((1..=MAX_LENGTH).filter(|l| *l != base)).collect()
            } else {
                vec![scheme.punishment_length]
            };
            for length in lengths {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                let candidate = PunishmentScheme { punishment_length: length, ..scaled.clone() };
                let Ok(a) = build_folk_automaton(self.spec, &candidate, discount.clone()) else { return None };
                if check_self_enforcing(self.spec, &a).is_ok_and(|v| v.is_self_enforcing()) {
                    return Some(candidate);
                }
            }
        }
        None
    }
}
