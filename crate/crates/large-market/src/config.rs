//! Parameters of the tiered random market, read from TOML.
//!
//! ```toml
//! quota = 2
//! beta = 1.0
//! hospitals = { shares = [0.5, 0.5] }
//! students = { counts = [80, 320] }
//! common_values = [3.0, 1.0]
//!
//! [experiment]
//! tier = 1
//! epsilon = 0.5
//! gamma = 0.1
//! ```
//!
//! `hospitals` and `students` take either `shares` (rounded against the
//! market size by largest remainder) or explicit `counts`, which ignore `n`.

use serde::{Deserialize, Serialize};

use crate::LargeMarketError;

const SHARE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TierSizes {
    Shares(Vec<f64>),
    Counts(Vec<usize>),
}

impl TierSizes {
    pub fn len(&self) -> usize {
        match self {
            TierSizes::Shares(v) => v.len(),
            TierSizes::Counts(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tier sizes for a side with `total` members (ignored for `Counts`).
    pub fn resolve(&self, total: usize) -> Vec<usize> {
        match self {
            TierSizes::Counts(v) => v.clone(),
            TierSizes::Shares(v) => largest_remainder(v, total),
        }
    }

    fn validate(&self, side: &str) -> Result<(), LargeMarketError> {
        let bad = |msg: String| Err(LargeMarketError::Config(format!("{side}: {msg}")));
        if self.is_empty() {
            return bad("at least one tier is required".into());
        }
        if let TierSizes::Shares(v) = self {
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad("shares must be finite and nonnegative".into());
            }
            let total: f64 = v.iter().sum();
            if (total - 1.0).abs() > SHARE_TOLERANCE {
                return bad(format!("shares sum to {total}, not 1"));
            }
        }
        Ok(())
    }
}

/// Rounds `shares * total` to integers summing to `total`: floors first, then
/// one extra unit to the largest fractional parts, earlier tiers on ties.
pub fn largest_remainder(shares: &[f64], total: usize) -> Vec<usize> {
    let raw: Vec<f64> = shares.iter().map(|s| s * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueForm {
    /// `V(C, ζ) = C + ζ`.
    #[default]
    Additive,
}

impl ValueForm {
    pub fn value(self, common: f64, zeta: f64) -> f64 {
        match self {
            ValueForm::Additive => common + zeta,
        }
    }

    /// The shock `ζ` with `V(C, ζ) = v`.
    pub fn inverse(self, common: f64, v: f64) -> f64 {
        match self {
            ValueForm::Additive => v - common,
        }
    }
}

/// Knobs shared by the Monte Carlo experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentParams {
    /// Hospital tier of the designated (punished or audited) hospital.
    pub tier: usize,
    pub epsilon: f64,
    pub gamma: f64,
    /// Student tier used as the clustering pool; the last tier if absent.
    pub student_tier: Option<usize>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams { tier: 1, epsilon: 0.5, gamma: 0.1, student_tier: None }
    }
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierConfig {
    pub quota: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub hospitals: TierSizes,
    pub students: TierSizes,
    /// `C_1 > C_2 > ... >= 0`, one per student tier.
    pub common_values: Vec<f64>,
    #[serde(default)]
    pub value_form: ValueForm,
    #[serde(default)]
    pub experiment: ExperimentParams,
}

impl TierConfig {
    /// One hospital tier and one student tier with `C = 0`.
    pub fn single_tier(quota: usize, beta: f64) -> Self {
        TierConfig {
            quota,
            beta,
            hospitals: TierSizes::Shares(vec![1.0]),
            students: TierSizes::Shares(vec![1.0]),
            common_values: vec![0.0],
            value_form: ValueForm::Additive,
            experiment: ExperimentParams::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, LargeMarketError> {
        let cfg: TierConfig = toml::from_str(text).map_err(|e| LargeMarketError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), LargeMarketError> {
        let bad = |msg: &str| Err(LargeMarketError::Config(msg.into()));
        if self.quota == 0 {
            return bad("quota must be positive");
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad("beta must be positive");
        }
        self.hospitals.validate("hospitals")?;
        self.students.validate("students")?;
        if self.common_values.len() != self.students.len() {
            return bad("common_values needs one entry per student tier");
        }
        if self.common_values.iter().any(|c| !c.is_finite()) || self.common_values.last().is_some_and(|c| *c < 0.0) {
            return bad("common values must be finite and nonnegative");
        }
        if self.common_values.windows(2).any(|p| p[0] - p[1] < 1.0) {
            return bad("common values must decrease with gaps of at least 1");
        }
        let p = &self.experiment;
        if p.tier == 0 || p.tier > self.hospitals.len() {
            return bad("experiment.tier is not a hospital tier");
        }
        if p.student_tier.is_some_and(|l| l == 0 || l > self.students.len()) {
            return bad("experiment.student_tier is not a student tier");
        }
        Ok(())
    }

    pub fn num_hospital_tiers(&self) -> usize {
        self.hospitals.len()
    }

    pub fn num_student_tiers(&self) -> usize {
        self.students.len()
    }

    pub fn hospital_counts(&self, n: usize) -> Vec<usize> {
        self.hospitals.resolve(n)
    }

    /// `⌈β · |F| · q⌉` students split by share, unless counts are given.
    pub fn student_counts(&self, n: usize) -> Vec<usize> {
        let hospitals: usize = self.hospital_counts(n).iter().sum();
        let total = (self.beta * (hospitals * self.quota) as f64 - 1e-9).ceil().max(0.0) as usize;
        self.students.resolve(total)
    }

    pub fn common_value(&self, l: usize) -> f64 {
        self.common_values[l - 1]
    }

    pub fn value(&self, l: usize, zeta: f64) -> f64 {
        self.value_form.value(self.common_value(l), zeta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_is_exact() {
        assert_eq!(largest_remainder(&[1.0 / 3.0; 3], 10), vec![4, 3, 3]);
        assert_eq!(largest_remainder(&[0.25, 0.75], 10), vec![3, 7]);
        assert_eq!(largest_remainder(&[0.5, 0.5], 0), vec![0, 0]);
        assert_eq!(largest_remainder(&[1.0], 7), vec![7]);
    }

    #[test]
    fn toml_round_trip() {
        let text = "quota = 2\nhospitals = { counts = [2, 198] }\nstudents = { counts = [80, 320] }\n\
                    common_values = [3.0, 1.0]\n[experiment]\ntier = 1\n";
        let cfg = TierConfig::from_toml(text).unwrap();
        assert_eq!(cfg.beta, 1.0);
        assert_eq!(cfg.hospital_counts(5), vec![2, 198]);
        assert_eq!(TierConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = TierConfig::single_tier(1, 1.0);
        let mut c = base.clone();
        c.hospitals = TierSizes::Shares(vec![0.5, 0.4]);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.students = TierSizes::Shares(vec![0.5, 0.5]);
        c.common_values = vec![1.5, 1.0];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.quota = 0;
        assert!(c.validate().is_err());
        assert!(TierConfig::from_toml("quota = 1\nbogus = 3\n").is_err());
        assert!(base.validate().is_ok());
    }

    #[test]
    fn student_total_rounds_up() {
        let mut c = TierConfig::single_tier(2, 1.0);
        assert_eq!(c.student_counts(50), vec![100]);
        c.beta = 0.51;
        assert_eq!(c.student_counts(3), vec![4]);
    }
}
