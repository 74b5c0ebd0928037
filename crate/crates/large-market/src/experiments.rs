//! Monte Carlo experiments on freshly sampled markets, one market per trial.

use std::str::FromStr;

use market_core::{HospitalId, Matching, Scalar, StudentId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use static_algorithms::{layered_matching, InnerRule, SeatOrder};

use crate::{generate_market_with, run_trials, Estimate, LargeMarketError, RealizedMarket, TierConfig};

/// One CSV line: `experiment,n,trials,statistic,value,stderr`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatRow {
    pub experiment: String,
    pub n: usize,
    pub trials: usize,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

impl StatRow {
    fn new(experiment: &str, n: usize, trials: usize, statistic: impl Into<String>, value: f64, stderr: Option<f64>) -> Self {
        StatRow { experiment: experiment.into(), n, trials, statistic: statistic.into(), value, stderr }
    }
}

fn collect<T>(results: Vec<Result<T, LargeMarketError>>) -> Result<Vec<T>, LargeMarketError> {
    results.into_iter().collect()
}

/// Tier-`k` data shared by the punishment experiments.
struct Punished {
    market: RealizedMarket,
    layered: usize,
    target: HospitalId,
}

fn punished(cfg: &TierConfig, n: usize, rotate: Option<u64>, rng: &mut ChaCha8Rng) -> Result<Punished, LargeMarketError> {
    let market = generate_market_with(cfg, n, rng)?;
    let k = cfg.experiment.tier;
    let members = market.hospitals_in(k);
    let Some(layered) = market.layered_tier(k) else {
        return Err(LargeMarketError::Parameter(format!("hospital tier {k} is empty at n = {n}")));
    };
    let target = match rotate {
        Some(i) => members[i as usize % members.len()],
        None => members[0],
    };
    Ok(Punished { market, layered, target })
}

/// 1-based rank of `w` in `f`'s order among students the higher tiers left.
fn submarket_rank(p: &Punished, m: &Matching, w: StudentId) -> usize {
    let k = p.market.hospital_tier[p.target.0];
    let taken = |v: StudentId| m.assignment(v).is_some_and(|g| p.market.hospital_tier[g.0] < k);
    let ranked = p.market.spec.ranked_students(p.target);
    1 + ranked.iter().take_while(|v| **v != w).filter(|v| !taken(**v)).count()
}

fn seats_in_tier(cfg: &TierConfig, n: usize) -> usize {
    cfg.hospital_counts(n).get(cfg.experiment.tier - 1).copied().unwrap_or(0) * cfg.quota
}

/// Probability that the designated tier-1 hospital has more than `q`
/// tier-1 students who rank it first and are worth more than
/// `V(C_1, 1) - ε` to it.
pub fn top_fill_probability(
    cfg: &TierConfig,
    n: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<Estimate, LargeMarketError> {
    cfg.validate()?;
    let threshold = cfg.value(1, 1.0) - epsilon;
    let hits = collect(run_trials(seed, trials, |_, rng| {
        let market = generate_market_with(cfg, n, rng)?;
        let f = market.designated(1)?;
        let eager = market
            .students_in(1)
            .into_iter()
            .filter(|w| market.spec.acceptable(*w).first() == Some(&f) && *market.spec.utility(f, *w) > threshold)
            .count();
        Ok(eager > cfg.quota)
    }))?;
    Ok(Estimate::proportion(hits.iter().filter(|h| **h).count(), trials))
}

/// Pooled over seats: `counts[r - 1]` is how often a seat of the punished
/// hospital held its `r`-th favorite available student.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankHistogram {
    pub counts: Vec<u64>,
}

impl RankHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts.iter().map(|c| *c as f64 / total).collect()
    }

    pub fn max_deviation(&self) -> f64 {
        let u = 1.0 / self.counts.len().max(1) as f64;
        self.frequencies().iter().map(|p| (p - u).abs()).fold(0.0, f64::max)
    }

    pub fn total_variation(&self) -> f64 {
        let u = 1.0 / self.counts.len().max(1) as f64;
        0.5 * self.frequencies().iter().map(|p| (p - u).abs()).sum::<f64>()
    }
}

/// Ranks the punitive matching gives the punished tier-`k` hospital.
pub fn rank_distribution(cfg: &TierConfig, n: usize, trials: usize, seed: u64) -> Result<RankHistogram, LargeMarketError> {
    cfg.validate()?;
    let per_trial = collect(run_trials(seed, trials, |_, rng| {
        let p = punished(cfg, n, None, rng)?;
        let m = layered_matching(&p.market.spec, &p.market.tiers, p.layered, &InnerRule::Punitive(p.target))?;
        Ok(m.members(p.target).iter().map(|w| submarket_rank(&p, &m, *w)).collect::<Vec<_>>())
    }))?;
    let mut counts = vec![0u64; seats_in_tier(cfg, n)];
    for r in per_trial.into_iter().flatten() {
        if r > counts.len() {
            counts.resize(r, 0);
        }
        counts[r - 1] += 1;
    }
    Ok(RankHistogram { counts })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    /// Designated hospital's utility under the seat serial dictatorship.
    pub reward: Estimate,
    /// Its utility under its own punitive matching.
    pub punish: Estimate,
    /// Paired difference `reward - punish`.
    pub gap: Estimate,
    /// Mean of `rank / (|F_k| q)` over its punitive hires.
    pub punished_rank_fraction: Estimate,
}

pub fn punishment_gap(cfg: &TierConfig, n: usize, trials: usize, seed: u64) -> Result<GapReport, LargeMarketError> {
    cfg.validate()?;
    let seats = seats_in_tier(cfg, n).max(1) as f64;
    let samples = collect(run_trials(seed, trials, |_, rng| {
        let p = punished(cfg, n, None, rng)?;
        let order = SeatOrder::Seeded(rng.random());
        let spec = &p.market.spec;
        let reward = layered_matching(spec, &p.market.tiers, p.layered, &InnerRule::Rsd(order))?;
        let punish = layered_matching(spec, &p.market.tiers, p.layered, &InnerRule::Punitive(p.target))?;
        let ranks: Vec<f64> = punish.members(p.target).iter().map(|w| submarket_rank(&p, &punish, *w) as f64 / seats).collect();
        let fraction = if ranks.is_empty() { None } else { Some(ranks.iter().sum::<f64>() / ranks.len() as f64) };
        Ok((spec.utility_of(p.target, reward.members(p.target)), spec.utility_of(p.target, punish.members(p.target)), fraction))
    }))?;
    let reward: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let punish: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let gap: Vec<f64> = samples.iter().map(|s| s.0 - s.1).collect();
    let fractions: Vec<f64> = samples.iter().filter_map(|s| s.2).collect();
    Ok(GapReport {
        reward: Estimate::mean(&reward),
        punish: Estimate::mean(&punish),
        gap: Estimate::mean(&gap),
        punished_rank_fraction: Estimate::mean(&fractions),
    })
}

/// Probability that the designated hospital's `⌈γ|V|⌉` least favorite
/// students of the pool tier all have shocks below `ε`.
pub fn clustering(
    cfg: &TierConfig,
    n: usize,
    epsilon: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<Estimate, LargeMarketError> {
    cfg.validate()?;
    if !(0.0 < gamma && gamma < epsilon && epsilon < 1.0) {
        return Err(LargeMarketError::Parameter(format!("need 0 < gamma < epsilon < 1, got gamma = {gamma}, epsilon = {epsilon}")));
    }
    let l = cfg.experiment.student_tier.unwrap_or(cfg.num_student_tiers());
    let hits = collect(run_trials(seed, trials, |_, rng| {
        let p = punished(cfg, n, None, rng)?;
        let f = p.target;
        let mut pool = p.market.students_in(l);
        pool.sort_by(|a, b| p.market.spec.utility(f, *a).total_cmp(p.market.spec.utility(f, *b)));
        let tail = (gamma * pool.len() as f64 - 1e-9).ceil().max(0.0) as usize;
        Ok(pool.iter().take(tail).all(|w| p.market.zeta[f.0][w.0] < epsilon))
    }))?;
    Ok(Estimate::proportion(hits.iter().filter(|h| **h).count(), trials))
}

/// A profitable deviation from a punitive matching.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub trial: u64,
    pub hospital: String,
    pub students: Vec<String>,
    pub current: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoDeviationReport {
    pub trials: usize,
    pub violations: usize,
    /// Lowest-index failing trial.
    pub counterexample: Option<Counterexample>,
}

impl NoDeviationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks every trial's punitive matching for a profitable `(f, W)` by the
/// punished hospital. The target rotates through tier `k` by trial index.
/// The scan takes the best willing roster, which is the maximum over all
/// feasible `W` for additive utilities.
pub fn no_deviation_from_punishment(
    cfg: &TierConfig,
    n: usize,
    trials: usize,
    seed: u64,
    reversed: bool,
) -> Result<NoDeviationReport, LargeMarketError> {
    cfg.validate()?;
    let rule = |f| if reversed { InnerRule::PunitiveReversed(f) } else { InnerRule::Punitive(f) };
    let found = collect(run_trials(seed, trials, |i, rng| {
        let p = punished(cfg, n, Some(i), rng)?;
        let spec = &p.market.spec;
        let m = layered_matching(spec, &p.market.tiers, p.layered, &rule(p.target))?;
        let current = spec.utility_of(p.target, m.members(p.target));
        let (best, value) = spec.best_response(p.target, &m);
        Ok((value > current + f64::payoff_tolerance()).then(|| Counterexample {
            trial: i,
            hospital: spec.hospital_name(p.target).to_string(),
            students: best.iter().map(|w| spec.student_name(*w).to_string()).collect(),
            current,
            deviation: value,
        }))
    }))?;
    let violations = found.iter().filter(|c| c.is_some()).count();
    Ok(NoDeviationReport { trials, violations, counterexample: found.into_iter().flatten().next() })
}

/// Experiments runnable from a config file alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Fill,
    Rank,
    Gap,
    Clustering,
    NoDev,
}

impl FromStr for Experiment {
    type Err = LargeMarketError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "fill" => Experiment::Fill,
            "rank" => Experiment::Rank,
            "gap" => Experiment::Gap,
            "clustering" => Experiment::Clustering,
            "nodev" => Experiment::NoDev,
            other => return Err(LargeMarketError::Parameter(format!("unknown experiment {other}"))),
        })
    }
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fill => "fill",
            Experiment::Rank => "rank",
            Experiment::Gap => "gap",
            Experiment::Clustering => "clustering",
            Experiment::NoDev => "nodev",
        }
    }

    /// Runs the experiment with parameters from `cfg.experiment`.
    pub fn run(self, cfg: &TierConfig, n: usize, trials: usize, seed: u64) -> Result<Vec<StatRow>, LargeMarketError> {
        let name = self.name();
        let row = |stat: &str, e: Estimate| StatRow::new(name, n, trials, stat, e.value, Some(e.stderr));
        let plain = |stat: String, v: f64| StatRow::new(name, n, trials, stat, v, None);
        let p = &cfg.experiment;
        Ok(match self {
            Experiment::Fill => vec![row("probability", top_fill_probability(cfg, n, p.epsilon, trials, seed)?)],
            Experiment::Clustering => vec![row("probability", clustering(cfg, n, p.epsilon, p.gamma, trials, seed)?)],
            Experiment::Rank => {
                let h = rank_distribution(cfg, n, trials, seed)?;
                let mut rows: Vec<StatRow> =
                    h.frequencies().iter().enumerate().map(|(r, f)| plain(format!("freq_{}", r + 1), *f)).collect();
                rows.push(plain("max_abs_deviation".into(), h.max_deviation()));
                rows.push(plain("total_variation".into(), h.total_variation()));
                rows
            }
            Experiment::Gap => {
                let g = punishment_gap(cfg, n, trials, seed)?;
                vec![
                    row("reward_mean", g.reward),
                    row("punish_mean", g.punish),
                    row("gap", g.gap),
                    row("punished_rank_fraction", g.punished_rank_fraction),
                ]
            }
            Experiment::NoDev => {
                let r = no_deviation_from_punishment(cfg, n, trials, seed, false)?;
                vec![plain("violations".into(), r.violations as f64)]
            }
        })
    }
}
