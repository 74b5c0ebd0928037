//! The top coalition sequence: iteratively remove hospital/student groups
//! that are mutual favorites among the players still present.

use market_core::{HospitalId, MarketSpec, Scalar, StudentId};

use crate::AlgorithmError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TopCoalitionSequence {
    /// Pairs in the order they were removed; student sets sorted by id.
    pub pairs: Vec<(HospitalId, Vec<StudentId>)>,
    pub residual_hospitals: Vec<HospitalId>,
    pub residual_students: Vec<StudentId>,
}

impl TopCoalitionSequence {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains_hospital(&self, f: HospitalId) -> bool {
        self.pairs.iter().any(|(g, _)| *g == f)
    }

    pub fn contains_student(&self, w: StudentId) -> bool {
        self.pairs.iter().any(|(_, ws)| ws.contains(&w))
    }

    /// The students paired with `f`, if `f` is in the sequence.
    pub fn students_of(&self, f: HospitalId) -> Option<&[StudentId]> {
        self.pairs.iter().find(|(g, _)| *g == f).map(|(_, ws)| ws.as_slice())
    }

    pub fn hospitals(&self) -> impl Iterator<Item = HospitalId> + '_ {
        self.pairs.iter().map(|(f, _)| *f)
    }
}

/// The unique candidate group for `f` among the remaining players, if it is a
/// top coalition. Positive additive utilities make `f`'s favorite group its
/// top `min(q, remaining)` students.
pub fn top_coalition_for<S: Scalar>(
    spec: &MarketSpec<S>,
    hospitals_left: &[bool],
    students_left: &[bool],
    f: HospitalId,
) -> Option<Vec<StudentId>> {
    if !hospitals_left[f.0] {
        return None;
    }
    let mut group: Vec<StudentId> =
        spec.ranked_students(f).iter().copied().filter(|w| students_left[w.0]).take(spec.quota(f)).collect();
    let favored = group.iter().all(|&w| {
        spec.acceptable(w).iter().copied().find(|g| hospitals_left[g.0]) == Some(f)
    });
    favored.then(|| {
        group.sort();
        group
    })
}

/// Checks both halves of the definition directly, by brute force over
/// student subsets. Independent of [`top_coalition_for`].
pub fn is_top_coalition<S: Scalar>(
    spec: &MarketSpec<S>,
    hospitals_left: &[bool],
    students_left: &[bool],
    f: HospitalId,
    group: &[StudentId],
) -> bool {
    if !hospitals_left[f.0] || group.len() > spec.quota(f) || group.iter().any(|w| !students_left[w.0]) {
        return false;
    }
    let pool: Vec<StudentId> = spec.students().filter(|w| students_left[w.0]).collect();
    let value = spec.utility_of(f, group);
    let mut favorite = true;
    market_core::for_each_subset(&pool, spec.quota(f), |other| favorite &= spec.utility_of(f, other) <= value);
    let mutual = group.iter().all(|&w| {
        spec.is_acceptable(w, f)
            && spec.hospitals().filter(|g| hospitals_left[g.0]).all(|g| !spec.prefers(w, Some(g), Some(f)))
    });
    favorite && mutual
}

/// Phases pick the qualifying hospital with the smallest id.
pub fn top_coalition_sequence<S: Scalar>(spec: &MarketSpec<S>) -> TopCoalitionSequence {
    let order: Vec<HospitalId> = spec.hospitals().collect();
    run(spec, &order)
}

/// Phases pick the first qualifying hospital in `priority`, which must list
/// every hospital once.
pub fn top_coalition_sequence_by<S: Scalar>(
    spec: &MarketSpec<S>,
    priority: &[HospitalId],
) -> Result<TopCoalitionSequence, AlgorithmError> {
    let mut seen = vec![false; spec.num_hospitals()];
    for f in priority {
        spec.check_hospital(*f)?;
        if std::mem::replace(&mut seen[f.0], true) {
            return Err(AlgorithmError::InvalidPriority);
        }
    }
    if priority.len() != spec.num_hospitals() {
        return Err(AlgorithmError::InvalidPriority);
    }
    Ok(run(spec, priority))
}

fn run<S: Scalar>(spec: &MarketSpec<S>, order: &[HospitalId]) -> TopCoalitionSequence {
    let mut hospitals_left = vec![true; spec.num_hospitals()];
    let mut students_left = vec![true; spec.num_students()];
    let mut pairs = Vec::new();
    while let Some((f, group)) =
        order.iter().find_map(|&f| top_coalition_for(spec, &hospitals_left, &students_left, f).map(|g| (f, g)))
    {
        hospitals_left[f.0] = false;
        for w in &group {
            students_left[w.0] = false;
        }
        pairs.push((f, group));
    }
    TopCoalitionSequence {
        pairs,
        residual_hospitals: spec.hospitals().filter(|f| hospitals_left[f.0]).collect(),
        residual_students: spec.students().filter(|w| students_left[w.0]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use market_core::fixtures;

    #[test]
    fn example1_is_empty() {
        let spec = fixtures::example1();
        let tcs = top_coalition_sequence(&spec);
        assert!(tcs.is_empty());
        assert_eq!(tcs.residual_students.len(), 4);
        assert_eq!(tcs.residual_hospitals.len(), 2);
    }

    #[test]
    fn exhausted_students_leave_empty_pairs() {
        let spec: market_core::Market = fixtures::parse_market(
            "HOSPITALS\nf1 1 : a=2 b=1\nf2 1 : a=1 b=2\nf3 1 : a=1 b=2\nSTUDENTS\na : f1 f2 f3\nb : f1 f2 f3\n",
        );
        let tcs = top_coalition_sequence(&spec);
        let names: Vec<(&str, usize)> = tcs.pairs.iter().map(|(f, w)| (spec.hospital_name(*f), w.len())).collect();
        assert_eq!(names, vec![("f1", 1), ("f2", 1), ("f3", 0)]);
        assert!(tcs.residual_students.is_empty());
    }

    #[test]
    fn bad_priority_rejected() {
        let spec = fixtures::example1();
        assert_eq!(top_coalition_sequence_by(&spec, &[HospitalId(0)]), Err(AlgorithmError::InvalidPriority));
        assert_eq!(
            top_coalition_sequence_by(&spec, &[HospitalId(0), HospitalId(0)]),
            Err(AlgorithmError::InvalidPriority)
        );
    }
}
