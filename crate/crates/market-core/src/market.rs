use std::collections::HashSet;
use std::fmt;

use crate::error::MarketError;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HospitalId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StudentId(pub usize);

impl fmt::Display for HospitalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f#{}", self.0)
    }
}

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w#{}", self.0)
    }
}

/// Input row for one hospital. `utilities[i]` is the value of student `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HospitalSpec<S> {
    pub name: String,
    pub quota: usize,
    pub utilities: Vec<S>,
}

/// Input row for one student: acceptable hospitals, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StudentSpec {
    pub name: String,
    pub acceptable: Vec<HospitalId>,
}

const UNACCEPTABLE: u32 = u32::MAX;

/// A stage game: hospitals with quotas and additive strict utilities, students
/// with strict orders over acceptable hospitals. Unlisted hospitals rank below
/// the outside option.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketSpec<S> {
    hospitals: Vec<HospitalSpec<S>>,
    students: Vec<StudentSpec>,
    // rank[w][f]: position of f in w's list, or UNACCEPTABLE.
    rank: Vec<Vec<u32>>,
    // by_utility[f]: students sorted by decreasing utility to f.
    by_utility: Vec<Vec<StudentId>>,
    // position[f][w]: index of w in by_utility[f].
    position: Vec<Vec<u32>>,
}

impl<S: Scalar> MarketSpec<S> {
    pub fn new(hospitals: Vec<HospitalSpec<S>>, students: Vec<StudentSpec>) -> Result<Self, MarketError> {
        let mut names = HashSet::new();
        for name in hospitals.iter().map(|h| &h.name).chain(students.iter().map(|w| &w.name)) {
            if !names.insert(name.as_str()) {
                return Err(MarketError::DuplicateName(name.clone()));
            }
        }
        let n_students = students.len();
        for h in &hospitals {
            if h.quota == 0 {
                return Err(MarketError::ZeroQuota(h.name.clone()));
            }
            if h.utilities.len() != n_students {
                return Err(MarketError::UtilityRowLength {
                    hospital: h.name.clone(),
                    expected: n_students,
                    found: h.utilities.len(),
                });
            }
            for (w, u) in h.utilities.iter().enumerate() {
                if *u <= S::zero() {
                    return Err(MarketError::NonPositiveUtility {
                        hospital: h.name.clone(),
                        student: students[w].name.clone(),
                        value: u.to_string(),
                    });
                }
            }
        }
        let mut rank = vec![vec![UNACCEPTABLE; hospitals.len()]; n_students];
        for (w, student) in students.iter().enumerate() {
            for (pos, f) in student.acceptable.iter().enumerate() {
                let slot = rank[w].get_mut(f.0).ok_or(MarketError::UnknownHospital(f.0))?;
                if *slot != UNACCEPTABLE {
                    return Err(MarketError::DuplicatePreference {
                        student: student.name.clone(),
                        hospital: hospitals[f.0].name.clone(),
                    });
                }
                *slot = pos as u32;
            }
        }
        let mut by_utility = Vec::with_capacity(hospitals.len());
        for h in &hospitals {
            let mut order: Vec<StudentId> = (0..n_students).map(StudentId).collect();
            order.sort_by(|a, b| h.utilities[b.0].partial_cmp(&h.utilities[a.0]).expect("comparable utilities"));
            for pair in order.windows(2) {
                if h.utilities[pair[0].0] == h.utilities[pair[1].0] {
                    return Err(MarketError::DuplicateUtility {
                        hospital: h.name.clone(),
                        value: h.utilities[pair[0].0].to_string(),
                    });
                }
            }
            by_utility.push(order);
        }
        let position = by_utility
            .iter()
            .map(|order| {
                let mut pos = vec![0u32; n_students];
                for (i, w) in order.iter().enumerate() {
                    pos[w.0] = i as u32;
                }
                pos
            })
            .collect();
        Ok(MarketSpec { hospitals, students, rank, by_utility, position })
    }

    pub fn num_hospitals(&self) -> usize {
        self.hospitals.len()
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn hospitals(&self) -> impl ExactSizeIterator<Item = HospitalId> + Clone {
        (0..self.hospitals.len()).map(HospitalId)
    }

    pub fn students(&self) -> impl ExactSizeIterator<Item = StudentId> + Clone {
        (0..self.students.len()).map(StudentId)
    }

    pub fn hospital_spec(&self, f: HospitalId) -> &HospitalSpec<S> {
        &self.hospitals[f.0]
    }

    pub fn student_spec(&self, w: StudentId) -> &StudentSpec {
        &self.students[w.0]
    }

    pub fn hospital_name(&self, f: HospitalId) -> &str {
        &self.hospitals[f.0].name
    }

    pub fn student_name(&self, w: StudentId) -> &str {
        &self.students[w.0].name
    }

    pub fn hospital_by_name(&self, name: &str) -> Option<HospitalId> {
        self.hospitals.iter().position(|h| h.name == name).map(HospitalId)
    }

    pub fn student_by_name(&self, name: &str) -> Option<StudentId> {
        self.students.iter().position(|w| w.name == name).map(StudentId)
    }

    pub fn quota(&self, f: HospitalId) -> usize {
        self.hospitals[f.0].quota
    }

    pub fn utility(&self, f: HospitalId, w: StudentId) -> &S {
        &self.hospitals[f.0].utilities[w.0]
    }

    /// Students in decreasing order of utility to `f`.
    pub fn ranked_students(&self, f: HospitalId) -> &[StudentId] {
        &self.by_utility[f.0]
    }

    /// Zero-based position of `w` in `f`'s ranking; 0 is the favorite.
    pub fn hospital_rank(&self, f: HospitalId, w: StudentId) -> usize {
        self.position[f.0][w.0] as usize
    }

    /// Acceptable hospitals of `w`, best first.
    pub fn acceptable(&self, w: StudentId) -> &[HospitalId] {
        &self.students[w.0].acceptable
    }

    pub fn is_acceptable(&self, w: StudentId, f: HospitalId) -> bool {
        self.rank[w.0][f.0] != UNACCEPTABLE
    }

    /// Position of an option in `w`'s order; lower is better. The outside option
    /// sits just after the acceptable list and unacceptable hospitals below it.
    pub fn student_rank(&self, w: StudentId, option: Option<HospitalId>) -> u32 {
        match option {
            Some(f) => self.rank[w.0][f.0],
            None => self.students[w.0].acceptable.len() as u32,
        }
    }

    /// Whether `w` strictly prefers `a` to `b` (`None` is the outside option).
    pub fn prefers(&self, w: StudentId, a: Option<HospitalId>, b: Option<HospitalId>) -> bool {
        self.student_rank(w, a) < self.student_rank(w, b)
    }

    pub fn check_hospital(&self, f: HospitalId) -> Result<(), MarketError> {
        if f.0 < self.hospitals.len() {
            Ok(())
        } else {
            Err(MarketError::UnknownHospital(f.0))
        }
    }

    pub fn check_student(&self, w: StudentId) -> Result<(), MarketError> {
        if w.0 < self.students.len() {
            Ok(())
        } else {
            Err(MarketError::UnknownStudent(w.0))
        }
    }

    /// Sum of member utilities without validation.
    pub fn utility_of(&self, f: HospitalId, students: &[StudentId]) -> S {
        let row = &self.hospitals[f.0].utilities;
        students.iter().fold(S::zero(), |acc, w| acc + row[w.0].clone())
    }

    /// Additive set utility; zero for the empty set.
    pub fn set_utility(&self, f: HospitalId, students: &[StudentId]) -> Result<S, MarketError> {
        self.check_hospital(f)?;
        let set = normalize_set(self, students)?;
        if set.len() > self.quota(f) {
            return Err(MarketError::QuotaExceeded { hospital: f.0, size: set.len(), quota: self.quota(f) });
        }
        Ok(self.utility_of(f, &set))
    }

    /// Same hospitals and students with different utilities, e.g. a fresh cohort.
    pub fn same_players(&self, other: &MarketSpec<S>) -> bool {
        self.hospitals.len() == other.hospitals.len()
            && self
                .hospitals
                .iter()
                .zip(&other.hospitals)
                .all(|(a, b)| a.name == b.name && a.quota == b.quota)
    }
}

/// Sorted, deduplicated copy of a student set after id validation.
pub fn normalize_set<S: Scalar>(spec: &MarketSpec<S>, students: &[StudentId]) -> Result<Vec<StudentId>, MarketError> {
    let mut set = students.to_vec();
    set.sort_unstable();
    for pair in set.windows(2) {
        if pair[0] == pair[1] {
            return Err(MarketError::RepeatedStudent(pair[0].0));
        }
    }
    for w in &set {
        spec.check_student(*w)?;
    }
    Ok(set)
}

/// A stage-game matching: every student holds at most one hospital and every
/// hospital at most its quota. Ordering compares assignments student by student.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assign: Vec<Option<HospitalId>>,
    members: Vec<Vec<StudentId>>,
}

impl Matching {
    /// Everyone unmatched.
    pub fn empty(num_hospitals: usize, num_students: usize) -> Self {
        Matching { assign: vec![None; num_students], members: vec![Vec::new(); num_hospitals] }
    }

    pub fn empty_for<S: Scalar>(spec: &MarketSpec<S>) -> Self {
        Self::empty(spec.num_hospitals(), spec.num_students())
    }

    pub fn from_assignment<S: Scalar>(spec: &MarketSpec<S>, assign: Vec<Option<HospitalId>>) -> Result<Self, MarketError> {
        if assign.len() != spec.num_students() {
            return Err(MarketError::ShapeMismatch {
                side: "students",
                expected: spec.num_students(),
                found: assign.len(),
            });
        }
        let mut members = vec![Vec::new(); spec.num_hospitals()];
        for (w, slot) in assign.iter().enumerate() {
            if let Some(f) = slot {
                spec.check_hospital(*f)?;
                members[f.0].push(StudentId(w));
            }
        }
        for (f, set) in members.iter().enumerate() {
            let quota = spec.quota(HospitalId(f));
            if set.len() > quota {
                return Err(MarketError::QuotaExceeded { hospital: f, size: set.len(), quota });
            }
        }
        Ok(Matching { assign, members })
    }

    /// Builds a matching from hospital rosters; unlisted hospitals are empty.
    pub fn from_sets<S: Scalar>(
        spec: &MarketSpec<S>,
        sets: &[(HospitalId, Vec<StudentId>)],
    ) -> Result<Self, MarketError> {
        let mut assign = vec![None; spec.num_students()];
        for (f, set) in sets {
            spec.check_hospital(*f)?;
            for w in set {
                spec.check_student(*w)?;
                if assign[w.0].replace(*f).is_some() {
                    return Err(MarketError::RepeatedStudent(w.0));
                }
            }
        }
        Self::from_assignment(spec, assign)
    }

    pub fn num_hospitals(&self) -> usize {
        self.members.len()
    }

    pub fn num_students(&self) -> usize {
        self.assign.len()
    }

    pub fn assignment(&self, w: StudentId) -> Option<HospitalId> {
        self.assign[w.0]
    }

    pub fn assignments(&self) -> &[Option<HospitalId>] {
        &self.assign
    }

    /// Students matched to `f`, sorted by id.
    pub fn members(&self, f: HospitalId) -> &[StudentId] {
        &self.members[f.0]
    }

    /// Checks that the matching has the shape and quotas of `spec`.
    pub fn validate<S: Scalar>(&self, spec: &MarketSpec<S>) -> Result<(), MarketError> {
        if self.members.len() != spec.num_hospitals() {
            return Err(MarketError::ShapeMismatch {
                side: "hospitals",
                expected: spec.num_hospitals(),
                found: self.members.len(),
            });
        }
        Matching::from_assignment(spec, self.assign.clone()).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MarketSpec<f64> {
        MarketSpec::new(
            vec![HospitalSpec { name: "f".into(), quota: 1, utilities: vec![2.0, 1.0] }],
            vec![
                StudentSpec { name: "a".into(), acceptable: vec![HospitalId(0)] },
                StudentSpec { name: "b".into(), acceptable: vec![] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_duplicate_utilities() {
        let err = MarketSpec::new(
            vec![HospitalSpec { name: "f".into(), quota: 1, utilities: vec![1.0, 1.0] }],
            vec![
                StudentSpec { name: "a".into(), acceptable: vec![] },
                StudentSpec { name: "b".into(), acceptable: vec![] },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, MarketError::DuplicateUtility { .. }));
    }

    #[test]
    fn rejects_bad_rows() {
        let zero = MarketSpec::<f64>::new(
            vec![HospitalSpec { name: "f".into(), quota: 0, utilities: vec![] }],
            Vec::new(),
        );
        assert!(matches!(zero, Err(MarketError::ZeroQuota(_))));
        let negative = MarketSpec::new(
            vec![HospitalSpec { name: "f".into(), quota: 1, utilities: vec![-1.0] }],
            vec![StudentSpec { name: "a".into(), acceptable: vec![] }],
        );
        assert!(matches!(negative, Err(MarketError::NonPositiveUtility { .. })));
        let unknown = MarketSpec::<f64>::new(
            Vec::new(),
            vec![StudentSpec { name: "a".into(), acceptable: vec![HospitalId(3)] }],
        );
        assert_eq!(unknown.unwrap_err(), MarketError::UnknownHospital(3));
    }

    #[test]
    fn outside_option_sits_between_lists() {
        let spec = tiny();
        let (f, a, b) = (HospitalId(0), StudentId(0), StudentId(1));
        assert!(spec.prefers(a, Some(f), None));
        assert!(spec.prefers(b, None, Some(f)));
        assert!(!spec.is_acceptable(b, f));
        assert_eq!(spec.ranked_students(f), &[a, b]);
    }

    #[test]
    fn set_utility_checks_quota_and_ids() {
        let spec = tiny();
        let f = HospitalId(0);
        assert_eq!(spec.set_utility(f, &[]).unwrap(), 0.0);
        assert_eq!(spec.set_utility(f, &[StudentId(1)]).unwrap(), 1.0);
        assert!(spec.set_utility(f, &[StudentId(0), StudentId(1)]).is_err());
        assert!(spec.set_utility(f, &[StudentId(9)]).is_err());
        assert!(spec.set_utility(HospitalId(4), &[]).is_err());
    }

    #[test]
    fn matching_quota_enforced() {
        let spec = tiny();
        let full = vec![Some(HospitalId(0)), Some(HospitalId(0))];
        assert!(Matching::from_assignment(&spec, full).is_err());
        let m = Matching::from_sets(&spec, &[(HospitalId(0), vec![StudentId(1)])]).unwrap();
        assert_eq!(m.assignment(StudentId(1)), Some(HospitalId(0)));
        assert_eq!(m.members(HospitalId(0)), &[StudentId(1)]);
    }
}
