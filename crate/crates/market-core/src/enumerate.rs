//! Exhaustive enumeration of small markets; exponential, so guarded by a cap.

use crate::error::MarketError;
use crate::market::{HospitalId, Matching, MarketSpec, StudentId};
use crate::scalar::Scalar;

/// Largest number of free students an exhaustive enumeration will accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationCap(pub usize);

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap(10)
    }
}

/// Constraints on the enumerated matchings: some students are pinned to a
/// fixed option and some hospitals accept no one else.
#[derive(Clone, Debug, Default)]
pub struct Restriction {
    pinned: Vec<(StudentId, Option<HospitalId>)>,
    closed: Vec<HospitalId>,
}

impl Restriction {
    pub fn none() -> Self {
        Self::default()
    }

    /// Fixes `hospital` to hold exactly `students`.
    pub fn fix_roster(mut self, hospital: HospitalId, students: &[StudentId]) -> Self {
        self.closed.push(hospital);
        self.pinned.extend(students.iter().map(|w| (*w, Some(hospital))));
        self
    }
}

/// Visits every student-individually-rational matching satisfying the
/// restriction, in depth-first order (students by id, unmatched first).
pub fn for_each_ir_matching<S: Scalar>(
    spec: &MarketSpec<S>,
    restriction: &Restriction,
    cap: EnumerationCap,
    mut visit: impl FnMut(&Matching),
) -> Result<(), MarketError> {
    let n = spec.num_students();
    let mut pinned: Vec<Option<Option<HospitalId>>> = vec![None; n];
    for (w, f) in &restriction.pinned {
        spec.check_student(*w)?;
        pinned[w.0] = Some(*f);
    }
    let mut closed = vec![false; spec.num_hospitals()];
    for f in &restriction.closed {
        spec.check_hospital(*f)?;
        closed[f.0] = true;
    }
    let free = pinned.iter().filter(|p| p.is_none()).count();
    if free > cap.0 {
        return Err(MarketError::CapExceeded { students: free, cap: cap.0 });
    }
    let mut load = vec![0usize; spec.num_hospitals()];
    let mut assign = vec![None; n];
    for (w, p) in pinned.iter().enumerate() {
        if let Some(Some(f)) = p {
            load[f.0] += 1;
            assign[w] = Some(*f);
        }
    }
    if spec.hospitals().any(|f| load[f.0] > spec.quota(f)) {
        return Ok(());
    }
    let mut dfs = Dfs { spec, pinned: &pinned, closed: &closed, load, assign, visit: &mut visit };
    dfs.run(0);
    Ok(())
}

struct Dfs<'a, S, V> {
    spec: &'a MarketSpec<S>,
    pinned: &'a [Option<Option<HospitalId>>],
    closed: &'a [bool],
    load: Vec<usize>,
    assign: Vec<Option<HospitalId>>,
    visit: &'a mut V,
}

impl<S: Scalar, V: FnMut(&Matching)> Dfs<'_, S, V> {
    fn run(&mut self, w: usize) {
        if w == self.assign.len() {
            let m = Matching::from_assignment(self.spec, self.assign.clone()).expect("quotas respected");
            (self.visit)(&m);
            return;
        }
        if self.pinned[w].is_some() {
            self.run(w + 1);
            return;
        }
        self.assign[w] = None;
        self.run(w + 1);
        for &f in self.spec.acceptable(StudentId(w)) {
            if self.closed[f.0] || self.load[f.0] >= self.spec.quota(f) {
                continue;
            }
            self.load[f.0] += 1;
            self.assign[w] = Some(f);
            self.run(w + 1);
            self.load[f.0] -= 1;
        }
        self.assign[w] = None;
    }
}

/// All student-IR matchings (the set M°), sorted.
pub fn enumerate_ir_matchings<S: Scalar>(
    spec: &MarketSpec<S>,
    restriction: &Restriction,
    cap: EnumerationCap,
) -> Result<Vec<Matching>, MarketError> {
    let mut all = Vec::new();
    for_each_ir_matching(spec, restriction, cap, |m| all.push(m.clone()))?;
    all.sort();
    Ok(all)
}

/// All stable matchings, sorted.
pub fn enumerate_stable_matchings<S: Scalar>(spec: &MarketSpec<S>, cap: EnumerationCap) -> Result<Vec<Matching>, MarketError> {
    let mut stable = Vec::new();
    for_each_ir_matching(spec, &Restriction::none(), cap, |m| {
        if spec.is_stable(m) {
            stable.push(m.clone());
        }
    })?;
    stable.sort();
    Ok(stable)
}
