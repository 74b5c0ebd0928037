//! Finite lotteries with positive weights summing to one.

use market_core::scalar::sum;
use market_core::Scalar;

use crate::ProcessError;

#[derive(Clone, Debug, PartialEq)]
pub struct Lottery<T, S> {
    entries: Vec<(T, S)>,
}

impl<T: PartialEq + Clone, S: Scalar> Lottery<T, S> {
    /// Merges repeated outcomes, drops zero weights and checks that the
    /// total is one within the scalar's lottery tolerance.
    pub fn new(entries: Vec<(T, S)>) -> Result<Self, ProcessError> {
        let mut merged: Vec<(T, S)> = Vec::with_capacity(entries.len());
        for (item, weight) in entries {
            if weight.is_negative() {
                return Err(ProcessError::Lottery(format!("negative weight {weight}")));
            }
            if weight.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(t, _)| *t == item) {
                Some((_, w)) => *w = w.clone() + weight,
                None => merged.push((item, weight)),
            }
        }
        if merged.is_empty() {
            return Err(ProcessError::Lottery("no outcome has positive weight".into()));
        }
        let total = sum(merged.iter().map(|(_, w)| w.clone()));
        if (total.clone() - S::one()).abs() > S::lottery_tolerance() {
            return Err(ProcessError::Lottery(format!("weights sum to {total}")));
        }
        Ok(Lottery { entries: merged })
    }

    pub fn point(item: T) -> Self {
        Lottery { entries: vec![(item, S::one())] }
    }

    /// `weight` on `self` and `1 - weight` on `other`, for `weight` in `[0, 1]`.
    pub fn mix(&self, weight: &S, other: &Self) -> Result<Self, ProcessError> {
        if *weight < S::zero() || *weight > S::one() {
            return Err(ProcessError::Lottery(format!("mixing weight {weight} outside [0, 1]")));
        }
        let rest = S::one() - weight.clone();
        let entries = self
            .entries
            .iter()
            .map(|(t, w)| (t.clone(), w.clone() * weight.clone()))
            .chain(other.entries.iter().map(|(t, w)| (t.clone(), w.clone() * rest.clone())))
            .collect();
        Lottery::new(entries)
    }

    /// Equal weight on each item.
    pub fn uniform(items: Vec<T>) -> Result<Self, ProcessError> {
        let w = S::one() / market_core::scalar::from_count::<S>(items.len().max(1));
        Lottery::new(items.into_iter().map(|t| (t, w.clone())).collect())
    }

    pub fn entries(&self) -> &[(T, S)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &S)> {
        self.entries.iter().map(|(t, w)| (t, w))
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(t, _)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight_of(&self, item: &T) -> S {
        self.entries.iter().find(|(t, _)| t == item).map_or_else(S::zero, |(_, w)| w.clone())
    }

    pub fn expectation(&self, mut value: impl FnMut(&T) -> S) -> S {
        sum(self.entries.iter().map(|(t, w)| w.clone() * value(t)))
    }

    pub fn map<U: PartialEq + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Result<Lottery<U, S>, ProcessError> {
        Lottery::new(self.entries.iter().map(|(t, w)| (f(t), w.clone())).collect())
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> &T {
        let mut acc = 0.0;
        for (t, w) in &self.entries {
            acc += w.to_f64_lossy();
            if u < acc {
                return t;
            }
        }
        &self.entries.last().expect("lotteries are nonempty").0
    }
}
