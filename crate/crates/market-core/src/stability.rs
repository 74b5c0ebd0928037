//! Stage-game stability, coalitional deviations and attribution.

use crate::error::MarketError;
use crate::market::{normalize_set, HospitalId, Matching, MarketSpec, StudentId};
use crate::scalar::Scalar;

/// A candidate blocking coalition. `hospital == None` is a student leaving
/// alone for her outside option.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coalition {
    pub hospital: Option<HospitalId>,
    pub students: Vec<StudentId>,
}

/// How blocking coalitions are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoalitionScan {
    /// Top-k prefixes of the available set, enough under additive utilities.
    #[default]
    Prefix,
    /// Every subset of the available set up to quota.
    BruteForce,
}

/// Result of attributing a realized matching to a single deviator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attribution {
    Unchanged,
    Hospital(HospitalId),
    Unattributable,
}

impl<S: Scalar> MarketSpec<S> {
    /// Matched students weakly prefer their hospital to staying out, and no
    /// hospital gains by dropping members.
    pub fn is_individually_rational(&self, m: &Matching) -> bool {
        let students_ok = self
            .students()
            .all(|w| m.assignment(w).is_none_or(|f| self.is_acceptable(w, f)));
        let hospitals_ok = self
            .hospitals()
            .all(|f| m.members(f).iter().all(|w| *self.utility(f, *w) > S::zero()));
        students_ok && hospitals_ok
    }

    /// `m(f)` together with every student who strictly prefers `f` to her match.
    pub fn available_set(&self, f: HospitalId, m: &Matching) -> Vec<StudentId> {
        self.students()
            .filter(|&w| m.assignment(w) == Some(f) || self.prefers(w, Some(f), m.assignment(w)))
            .collect()
    }

    /// The available set in decreasing utility order.
    pub fn available_ranked(&self, f: HospitalId, m: &Matching) -> Vec<StudentId> {
        self.ranked_students(f)
            .iter()
            .copied()
            .filter(|&w| m.assignment(w) == Some(f) || self.prefers(w, Some(f), m.assignment(w)))
            .collect()
    }

    /// Best feasible roster for `f` against `m` and its utility.
    pub fn best_response(&self, f: HospitalId, m: &Matching) -> (Vec<StudentId>, S) {
        let mut best = self.available_ranked(f, m);
        best.truncate(self.quota(f));
        best.sort_unstable();
        let value = self.utility_of(f, &best);
        (best, value)
    }

    /// Every profitable coalition under the chosen scan, ordered by hospital
    /// then student set, followed by lone students who prefer to leave.
    pub fn blocking_coalitions_with(&self, m: &Matching, scan: CoalitionScan) -> Vec<Coalition> {
        let mut found = Vec::new();
        for f in self.hospitals() {
            let current = self.utility_of(f, m.members(f));
            let mut sets: Vec<Vec<StudentId>> = Vec::new();
            match scan {
                CoalitionScan::Prefix => {
                    let ranked = self.available_ranked(f, m);
                    let k_max = ranked.len().min(self.quota(f));
                    for k in 1..=k_max {
                        let mut set = ranked[..k].to_vec();
                        set.sort_unstable();
                        if self.utility_of(f, &set) > current {
                            sets.push(set);
                        }
                    }
                }
                CoalitionScan::BruteForce => {
                    let pool = self.available_set(f, m);
                    for_each_subset(&pool, self.quota(f), |set| {
                        if self.utility_of(f, set) > current {
                            sets.push(set.to_vec());
                        }
                    });
                }
            }
            sets.sort();
            found.extend(sets.into_iter().map(|students| Coalition { hospital: Some(f), students }));
        }
        for w in self.students() {
            if let Some(f) = m.assignment(w) {
                if !self.is_acceptable(w, f) {
                    found.push(Coalition { hospital: None, students: vec![w] });
                }
            }
        }
        found
    }

    pub fn blocking_coalitions(&self, m: &Matching) -> Vec<Coalition> {
        self.blocking_coalitions_with(m, CoalitionScan::Prefix)
    }

    /// Individually rational with no profitable hospital coalition. Under
    /// additive utilities a coalition exists iff some single student can be
    /// added to a hospital with a vacancy or swapped for its worst member.
    pub fn is_stable(&self, m: &Matching) -> bool {
        if !self.is_individually_rational(m) {
            return false;
        }
        self.hospitals().all(|f| {
            let members = m.members(f);
            let full = members.len() >= self.quota(f);
            let worst = members.iter().map(|w| self.utility(f, *w)).min_by(|a, b| a.partial_cmp(b).unwrap());
            self.students().all(|w| {
                if m.assignment(w) == Some(f) || !self.prefers(w, Some(f), m.assignment(w)) {
                    return true;
                }
                full && worst.is_some_and(|lo| self.utility(f, w) < lo)
            })
        })
    }

    /// `[m, (f, W)]`: `f` holds exactly `W`, every other hospital loses the
    /// members of `W`, and students dropped by `f` become unmatched.
    pub fn apply_deviation(&self, m: &Matching, f: HospitalId, students: &[StudentId]) -> Result<Matching, MarketError> {
        self.check_hospital(f)?;
        let set = normalize_set(self, students)?;
        if set.len() > self.quota(f) {
            return Err(MarketError::QuotaExceeded { hospital: f.0, size: set.len(), quota: self.quota(f) });
        }
        Ok(deviate(self, m, f, &set))
    }

    /// The unique hospital whose single coalition turns `m` into `realized`.
    pub fn identify_deviator(&self, m: &Matching, realized: &Matching) -> Attribution {
        if m == realized {
            return Attribution::Unchanged;
        }
        let mut candidates: Vec<HospitalId> = Vec::new();
        for w in self.students() {
            let (before, after) = (m.assignment(w), realized.assignment(w));
            if before != after {
                if let Some(f) = after.or(before) {
                    if !candidates.contains(&f) {
                        candidates.push(f);
                    }
                }
            }
        }
        for f in candidates {
            if deviate(self, m, f, realized.members(f)) == *realized {
                return Attribution::Hospital(f);
            }
        }
        Attribution::Unattributable
    }
}

/// `[m, (f, set)]` for a validated, sorted set.
pub(crate) fn deviate<S: Scalar>(spec: &MarketSpec<S>, m: &Matching, f: HospitalId, set: &[StudentId]) -> Matching {
    let mut assign = m.assignments().to_vec();
    for slot in assign.iter_mut() {
        if *slot == Some(f) {
            *slot = None;
        }
    }
    for w in set {
        assign[w.0] = Some(f);
    }
    Matching::from_assignment(spec, assign).expect("deviation keeps quotas")
}

/// Calls `visit` on every nonempty subset of `pool` with at most `max_size`
/// elements, in lexicographic order of positions.
pub fn for_each_subset<T: Copy>(pool: &[T], max_size: usize, mut visit: impl FnMut(&[T])) {
    let mut current = Vec::with_capacity(max_size);
    fn recurse<T: Copy>(pool: &[T], start: usize, max_size: usize, current: &mut Vec<T>, visit: &mut impl FnMut(&[T])) {
        for i in start..pool.len() {
            current.push(pool[i]);
            visit(current);
            if current.len() < max_size {
                recurse(pool, i + 1, max_size, current, visit);
            }
            current.pop();
        }
    }
    if max_size > 0 {
        recurse(pool, 0, max_size, &mut current, &mut visit);
    }
}
