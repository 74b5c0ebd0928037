use market_core::{HospitalId, MarketSpec, Scalar, StudentId};

use crate::AlgorithmError;

/// A subset of players with per-hospital hiring capacities. Algorithms run
/// on the submarket and report matchings over the full market, leaving
/// outsiders unmatched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submarket {
    hospitals: Vec<bool>,
    capacity: Vec<usize>,
    students: Vec<bool>,
}

impl Submarket {
    /// Every player, every hospital at its quota.
    pub fn full<S: Scalar>(spec: &MarketSpec<S>) -> Self {
        Submarket {
            hospitals: vec![true; spec.num_hospitals()],
            capacity: spec.hospitals().map(|f| spec.quota(f)).collect(),
            students: vec![true; spec.num_students()],
        }
    }

    pub fn new<S: Scalar>(
        spec: &MarketSpec<S>,
        hospitals: &[HospitalId],
        students: &[StudentId],
    ) -> Result<Self, AlgorithmError> {
        let mut sub = Submarket {
            hospitals: vec![false; spec.num_hospitals()],
            capacity: vec![0; spec.num_hospitals()],
            students: vec![false; spec.num_students()],
        };
        for &f in hospitals {
            spec.check_hospital(f)?;
            sub.hospitals[f.0] = true;
            sub.capacity[f.0] = spec.quota(f);
        }
        for &w in students {
            spec.check_student(w)?;
            sub.students[w.0] = true;
        }
        Ok(sub)
    }

    /// Overrides the hiring capacity of a member hospital.
    pub fn with_capacity<S: Scalar>(
        mut self,
        spec: &MarketSpec<S>,
        f: HospitalId,
        capacity: usize,
    ) -> Result<Self, AlgorithmError> {
        spec.check_hospital(f)?;
        if !self.hospitals[f.0] {
            return Err(AlgorithmError::NotInSubmarket(f));
        }
        if capacity > spec.quota(f) {
            return Err(AlgorithmError::CapacityAboveQuota { hospital: f, capacity, quota: spec.quota(f) });
        }
        self.capacity[f.0] = capacity;
        Ok(self)
    }

    pub fn contains_hospital(&self, f: HospitalId) -> bool {
        self.hospitals.get(f.0).copied().unwrap_or(false)
    }

    pub fn contains_student(&self, w: StudentId) -> bool {
        self.students.get(w.0).copied().unwrap_or(false)
    }

    /// Zero for hospitals outside the submarket.
    pub fn capacity(&self, f: HospitalId) -> usize {
        if self.contains_hospital(f) {
            self.capacity[f.0]
        } else {
            0
        }
    }

    pub fn hospitals(&self) -> impl Iterator<Item = HospitalId> + '_ {
        (0..self.hospitals.len()).filter(|&i| self.hospitals[i]).map(HospitalId)
    }

    pub fn students(&self) -> impl Iterator<Item = StudentId> + '_ {
        (0..self.students.len()).filter(|&i| self.students[i]).map(StudentId)
    }

    pub fn remove_student(&mut self, w: StudentId) {
        if let Some(slot) = self.students.get_mut(w.0) {
            *slot = false;
        }
    }

    pub fn total_seats(&self) -> usize {
        self.hospitals().map(|f| self.capacity[f.0]).sum()
    }
}
