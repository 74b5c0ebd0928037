//! Gale–Shapley deferred acceptance for responsive hospitals.

use market_core::{HospitalId, Matching, MarketSpec, Scalar, StudentId};

use crate::Submarket;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Proposer {
    /// Student-optimal stable matching.
    #[default]
    Students,
    /// Hospital-optimal stable matching.
    Hospitals,
}

pub fn deferred_acceptance<S: Scalar>(spec: &MarketSpec<S>, side: Proposer) -> Matching {
    deferred_acceptance_in(spec, &Submarket::full(spec), side)
}

/// Deferred acceptance among the submarket's players, hospitals hiring up to
/// their submarket capacity. Outsiders stay unmatched.
pub fn deferred_acceptance_in<S: Scalar>(spec: &MarketSpec<S>, sub: &Submarket, side: Proposer) -> Matching {
    let assign = match side {
        Proposer::Students => student_proposing(spec, sub),
        Proposer::Hospitals => hospital_proposing(spec, sub),
    };
    Matching::from_assignment(spec, assign).expect("capacities never exceed quotas")
}

fn student_proposing<S: Scalar>(spec: &MarketSpec<S>, sub: &Submarket) -> Vec<Option<HospitalId>> {
    let mut next = vec![0usize; spec.num_students()];
    let mut held: Vec<Vec<StudentId>> = vec![Vec::new(); spec.num_hospitals()];
    let mut free: Vec<StudentId> = sub.students().collect();
    free.reverse();
    while let Some(w) = free.pop() {
        let list = spec.acceptable(w);
        while next[w.0] < list.len() {
            let f = list[next[w.0]];
            next[w.0] += 1;
            let cap = sub.capacity(f);
            if cap == 0 {
                continue;
            }
            held[f.0].push(w);
            if held[f.0].len() <= cap {
                break;
            }
            let worst = (0..held[f.0].len())
                .max_by_key(|&i| spec.hospital_rank(f, held[f.0][i]))
                .expect("nonempty hold");
            let rejected = held[f.0].swap_remove(worst);
            if rejected != w {
                free.push(rejected);
                break;
            }
        }
    }
    let mut assign = vec![None; spec.num_students()];
    for f in spec.hospitals() {
        for w in &held[f.0] {
            assign[w.0] = Some(f);
        }
    }
    assign
}

fn hospital_proposing<S: Scalar>(spec: &MarketSpec<S>, sub: &Submarket) -> Vec<Option<HospitalId>> {
    let mut assign: Vec<Option<HospitalId>> = vec![None; spec.num_students()];
    let mut next = vec![0usize; spec.num_hospitals()];
    let mut count = vec![0usize; spec.num_hospitals()];
    let mut active: Vec<HospitalId> = sub.hospitals().collect();
    active.reverse();
    while let Some(f) = active.pop() {
        let ranked = spec.ranked_students(f);
        let cap = sub.capacity(f);
        while count[f.0] < cap && next[f.0] < ranked.len() {
            let w = ranked[next[f.0]];
            next[f.0] += 1;
            if !sub.contains_student(w) || !spec.is_acceptable(w, f) {
                continue;
            }
            let current = assign[w.0];
            if spec.prefers(w, Some(f), current) {
                if let Some(g) = current {
                    count[g.0] -= 1;
                    active.push(g);
                }
                assign[w.0] = Some(f);
                count[f.0] += 1;
            }
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;
    use market_core::fixtures;

    #[test]
    fn table1_extremes() {
        let t = fixtures::table1();
        assert_eq!(deferred_acceptance(&t.spec, Proposer::Students), t.m_w);
        assert_eq!(deferred_acceptance(&t.spec, Proposer::Hospitals), t.m_f);
    }

    #[test]
    fn zero_capacity_hospital_is_skipped() {
        let t = fixtures::table1();
        let f1 = t.spec.hospital_by_name("f1").unwrap();
        let sub = Submarket::full(&t.spec).with_capacity(&t.spec, f1, 0).unwrap();
        let m = deferred_acceptance_in(&t.spec, &sub, Proposer::Students);
        assert!(m.members(f1).is_empty());
        let m = deferred_acceptance_in(&t.spec, &sub, Proposer::Hospitals);
        assert!(m.members(f1).is_empty());
    }

    #[test]
    fn empty_market() {
        let spec: market_core::Market = fixtures::parse_market("HOSPITALS\nf 1 :\nSTUDENTS\n");
        assert_eq!(deferred_acceptance(&spec, Proposer::Students), Matching::empty_for(&spec));
    }
}
