//! Punitive matching: students are drafted in the punished hospital's
//! priority order, each taking her favorite remaining seat.

use market_core::{HospitalId, Matching, MarketSpec, Scalar, StudentId};

use crate::{AlgorithmError, Submarket};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PunitiveOrder {
    /// The target's favorite remaining student moves first.
    #[default]
    Priority,
    /// Deliberately wrong: the target's least favorite student moves first.
    /// Kept as a regression oracle for deviation scans.
    Reversed,
}

pub fn punitive_matching<S: Scalar>(
    spec: &MarketSpec<S>,
    sub: &Submarket,
    target: HospitalId,
) -> Result<Matching, AlgorithmError> {
    punitive_matching_with(spec, sub, target, PunitiveOrder::Priority)
}

/// Seats are unit clones of their hospital. A drafted student takes a seat at
/// her favorite acceptable hospital that still has one; a student with no
/// acceptable seat left stays unmatched and the draft moves on.
pub fn punitive_matching_with<S: Scalar>(
    spec: &MarketSpec<S>,
    sub: &Submarket,
    target: HospitalId,
    order: PunitiveOrder,
) -> Result<Matching, AlgorithmError> {
    spec.check_hospital(target)?;
    if !sub.contains_hospital(target) {
        return Err(AlgorithmError::NotInSubmarket(target));
    }
    let mut seats: Vec<usize> = spec.hospitals().map(|f| sub.capacity(f)).collect();
    let mut left: usize = seats.iter().sum();
    let mut assign = vec![None; spec.num_students()];
    let mut draft: Vec<StudentId> =
        spec.ranked_students(target).iter().copied().filter(|w| sub.contains_student(*w)).collect();
    if order == PunitiveOrder::Reversed {
        draft.reverse();
    }
    for w in draft {
        if left == 0 {
            break;
        }
        if let Some(&f) = spec.acceptable(w).iter().find(|f| seats[f.0] > 0) {
            seats[f.0] -= 1;
            left -= 1;
            assign[w.0] = Some(f);
        }
    }
    Ok(Matching::from_assignment(spec, assign).expect("seat counts respect quotas"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use market_core::fixtures;

    #[test]
    fn unit_pair_example() {
        let spec: market_core::Market =
            fixtures::parse_market("HOSPITALS\nf1 1 : a=2 b=1\nf2 1 : a=1 b=2\nSTUDENTS\na : f2 f1\nb : f2 f1\n");
        let m = punitive_matching(&spec, &Submarket::full(&spec), HospitalId(0)).unwrap();
        assert_eq!(m.members(HospitalId(0)), &[StudentId(1)]);
        assert_eq!(m.members(HospitalId(1)), &[StudentId(0)]);
    }

    #[test]
    fn single_pair_and_empty_students() {
        let spec: market_core::Market = fixtures::parse_market("HOSPITALS\nf 1 : w=1\nSTUDENTS\nw : f\n");
        let m = punitive_matching(&spec, &Submarket::full(&spec), HospitalId(0)).unwrap();
        assert_eq!(m.assignment(StudentId(0)), Some(HospitalId(0)));
        let none = Submarket::new(&spec, &[HospitalId(0)], &[]).unwrap();
        assert_eq!(punitive_matching(&spec, &none, HospitalId(0)).unwrap(), Matching::empty_for(&spec));
    }

    #[test]
    fn target_outside_submarket() {
        let t = fixtures::table1();
        let sub = Submarket::new(&t.spec, &[HospitalId(1)], &[StudentId(0)]).unwrap();
        assert_eq!(punitive_matching(&t.spec, &sub, HospitalId(0)), Err(AlgorithmError::NotInSubmarket(HospitalId(0))));
        assert!(punitive_matching(&t.spec, &sub, HospitalId(9)).is_err());
    }
}
