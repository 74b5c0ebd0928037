//! Minmax payoffs: the best-response value a hospital can guarantee against
//! the worst student-IR recommendation, optionally keeping the top
//! coalition sequence matched internally.

use market_core::{for_each_ir_matching, EnumerationCap, HospitalId, Matching, MarketSpec, Restriction, Scalar};
use static_algorithms::{top_coalition_sequence, TopCoalitionSequence};

use crate::ProcessError;

#[derive(Clone, Debug, PartialEq)]
pub struct MinmaxEntry<S> {
    pub hospital: HospitalId,
    pub value: S,
    /// First minimizing matching in enumeration order; `None` for hospitals
    /// in the top coalition sequence.
    pub argmin: Option<Matching>,
    pub locked: bool,
}

/// Minimizes every hospital's best-response value over the matchings allowed
/// by `restriction`. Returns `(value, argmin)` per hospital.
fn minimize<S: Scalar>(
    spec: &MarketSpec<S>,
    restriction: &Restriction,
    cap: EnumerationCap,
) -> Result<Vec<(S, Matching)>, ProcessError> {
    let mut best: Vec<Option<(S, Matching)>> = vec![None; spec.num_hospitals()];
    for_each_ir_matching(spec, restriction, cap, |m| {
        for f in spec.hospitals() {
            let (_, value) = spec.best_response(f, m);
            if best[f.0].as_ref().is_none_or(|(v, _)| value < *v) {
                best[f.0] = Some((value, m.clone()));
            }
        }
    })?;
    Ok(best.into_iter().map(|b| b.expect("the empty matching is always enumerated")).collect())
}

/// Naive minmax of `f` over all student-IR matchings.
pub fn naive_minmax<S: Scalar>(
    spec: &MarketSpec<S>,
    f: HospitalId,
    cap: EnumerationCap,
) -> Result<(S, Matching), ProcessError> {
    spec.check_hospital(f)?;
    Ok(minimize(spec, &Restriction::none(), cap)?.swap_remove(f.0))
}

/// Naive minmax of every hospital, from a single enumeration.
pub fn naive_minmax_all<S: Scalar>(spec: &MarketSpec<S>, cap: EnumerationCap) -> Result<Vec<(S, Matching)>, ProcessError> {
    minimize(spec, &Restriction::none(), cap)
}

/// Restriction pinning every top coalition pair.
pub fn tcs_restriction(tcs: &TopCoalitionSequence) -> Restriction {
    tcs.pairs.iter().fold(Restriction::none(), |r, (f, ws)| r.fix_roster(*f, ws))
}

/// Whether `m` keeps every top coalition hospital with exactly its group.
pub fn respects_tcs(tcs: &TopCoalitionSequence, m: &Matching) -> bool {
    tcs.pairs.iter().all(|(f, ws)| m.members(*f) == ws.as_slice())
}

/// Reduced minmax: the minimization keeps the top coalition sequence intact.
/// Locked hospitals report the utility of their own group.
pub fn reduced_minmax<S: Scalar>(spec: &MarketSpec<S>, cap: EnumerationCap) -> Result<Vec<MinmaxEntry<S>>, ProcessError> {
    let tcs = top_coalition_sequence(spec);
    let free = spec.hospitals().any(|f| !tcs.contains_hospital(f));
    let minima = if free { Some(minimize(spec, &tcs_restriction(&tcs), cap)?) } else { None };
    Ok(spec
        .hospitals()
        .map(|f| match (tcs.students_of(f), &minima) {
            (Some(group), _) => {
                MinmaxEntry { hospital: f, value: spec.utility_of(f, group), argmin: None, locked: true }
            }
            (None, Some(minima)) => {
                let (value, m) = minima[f.0].clone();
                MinmaxEntry { hospital: f, value, argmin: Some(m), locked: false }
            }
            (None, None) => unreachable!("some hospital is free"),
        })
        .collect())
}
