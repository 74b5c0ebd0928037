//! The capacity-reducing process on tiered random markets.
//!
//! Every period draws a fresh student cohort. In the normal regime the tier-`k`
//! hospitals get, with probability `p⁰`, the layered matching in which they
//! hire at most `q − 1` students, and otherwise a random serial dictatorship
//! reward. A tier-`k` hospital caught deviating gets its punitive matching
//! for `L` periods, then `λᶠ`: the normal lottery with probability `pʳ`,
//! otherwise the matching in which it alone hires nobody.
//!
//! Cohort randomness is folded into the output lotteries: each regime
//! outputs a uniform draw over a fixed sample of cohorts.

use std::fmt;

use large_market::{generate_market_with, trial_rng, RealizedMarket, TierConfig};
use market_core::{HospitalId, Market, Matching, Scalar as _};
use rand::Rng;
use repeated_core::{continuation_values, simulate_on_path, Automaton, Lottery, ProcessAutomaton};
use static_algorithms::{layered_matching, InnerRule, SeatOrder};

use crate::machine::{assemble, normal_state, punishment_state, reward_state, Regimes};
use crate::structure::check_outputs;
use crate::FolkError;

/// Stream offset separating reward draws from market generation.
const REWARD_STREAM: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityOptions {
    /// Configured hospital tier whose quotas are reduced.
    pub tier: usize,
    pub p0: f64,
    pub pr: f64,
    /// Defaults to the sizing rule on the measured margins.
    pub punishment_length: Option<usize>,
    pub discount: f64,
    /// Seeds the serial dictatorship draws.
    pub seed: u64,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions { tier: 1, p0: 0.5, pr: 0.9, punishment_length: None, discount: 0.95, seed: 0 }
    }
}

/// Expected stage payoffs of the tier-`k` hospitals, averaged over cohorts.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginReport {
    pub hospitals: Vec<String>,
    /// `u_f(λ⁰)`.
    pub target: Vec<f64>,
    /// `u_f(m̲ᶠ)`.
    pub punishment: Vec<f64>,
    /// `rewards[i][j] = u_{f_i}(λ^{f_j})`.
    pub rewards: Vec<Vec<f64>>,
    /// `min_{i,j} u_{f_i}(λ^{f_j}) − u_{f_i}(m̲^{f_i})`.
    pub above_punishment: f64,
    /// `min_i u_{f_i}(λ⁰) − u_{f_i}(λ^{f_i})`.
    pub below_target: f64,
    /// `min_{i≠j} u_{f_i}(λ^{f_j}) − u_{f_i}(λ^{f_i})`; infinite with one hospital.
    pub below_others: f64,
}

impl MarginReport {
    pub fn min(&self) -> f64 {
        self.above_punishment.min(self.below_target).min(self.below_others)
    }

    pub fn is_positive(&self) -> bool {
        self.min() > f64::payoff_tolerance()
    }

    fn compute(hospitals: Vec<String>, target: Vec<f64>, punishment: Vec<f64>, rewards: Vec<Vec<f64>>) -> Self {
        let n = target.len();
        let mut above = f64::INFINITY;
        let mut below_target = f64::INFINITY;
        let mut below_others = f64::INFINITY;
        for i in 0..n {
            below_target = below_target.min(target[i] - rewards[i][i]);
            for j in 0..n {
                above = above.min(rewards[i][j] - punishment[i]);
                if i != j {
                    below_others = below_others.min(rewards[i][j] - rewards[i][i]);
                }
            }
        }
        MarginReport {
            hospitals,
            target,
            punishment,
            rewards,
            above_punishment: above,
            below_target,
            below_others,
        }
    }
}

impl fmt::Display for MarginReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(", ");
        writeln!(out, "{{")?;
        writeln!(out, "  \"above_punishment\": {:.9},", self.above_punishment)?;
        writeln!(out, "  \"below_target\": {:.9},", self.below_target)?;
        if self.below_others.is_finite() {
            writeln!(out, "  \"below_others\": {:.9},", self.below_others)?;
        } else {
            writeln!(out, "  \"below_others\": null,")?;
        }
        writeln!(out, "  \"hospitals\": [{}],", self.hospitals.iter().map(|h| format!("\"{h}\"")).collect::<Vec<_>>().join(", "))?;
        writeln!(out, "  \"target\": [{}],", list(&self.target))?;
        writeln!(out, "  \"punishment\": [{}],", list(&self.punishment))?;
        write!(out, "  \"own_reward\": [{}]\n}}", list(&(0..self.target.len()).map(|i| self.rewards[i][i]).collect::<Vec<_>>()))
    }
}

/// `count` cohorts of the same hospitals, cohort `c` drawn from stream `c`.
pub fn sample_cohorts(cfg: &TierConfig, n: usize, count: usize, seed: u64) -> Result<Vec<RealizedMarket>, FolkError> {
    if count == 0 {
        return Err(FolkError::Input("at least one cohort is required".into()));
    }
    (0..count as u64)
        .map(|c| Ok(generate_market_with(cfg, n, &mut trial_rng(seed, c))?))
        .collect()
}

#[derive(Clone, Debug)]
pub struct CapacityProcess {
    pub automaton: Automaton,
    pub cohorts: Vec<RealizedMarket>,
    /// The tier-`k` hospitals, in the order of the automaton's regimes.
    pub hospitals: Vec<HospitalId>,
    pub margins: MarginReport,
}

impl CapacityProcess {
    pub fn specs(&self) -> Vec<Market> {
        self.cohorts.iter().map(|c| c.spec.clone()).collect()
    }

    pub fn normal_state(&self) -> usize {
        normal_state()
    }

    pub fn reward_state(&self, i: usize) -> usize {
        reward_state(i)
    }

    pub fn punishment_state(&self, i: usize, t: usize) -> usize {
        punishment_state(self.hospitals.len(), self.punishment_length(), i, t)
    }

    pub fn punishment_length(&self) -> usize {
        (self.automaton.num_states() - 1 - self.hospitals.len()) / self.hospitals.len()
    }

    /// The margins recomputed from continuation values instead of stage
    /// payoffs: reward and normal states are absorbing on path, and the last
    /// punishment state pays the punishment once before the reward.
    pub fn margins_from_values(&self) -> Result<MarginReport, FolkError> {
        let a = &self.automaton;
        let v = continuation_values(&self.specs(), a)?;
        let d = a.discount;
        let n = self.hospitals.len();
        let last = self.punishment_length() - 1;
        let target = self.hospitals.iter().map(|f| *v.get(normal_state(), *f)).collect();
        let rewards: Vec<Vec<f64>> = self
            .hospitals
            .iter()
            .map(|f| (0..n).map(|j| *v.get(reward_state(j), *f)).collect())
            .collect();
        let punishment = self
            .hospitals
            .iter()
            .enumerate()
            .map(|(i, f)| (v.get(self.punishment_state(i, last), *f) - d * rewards[i][i]) / (1.0 - d))
            .collect();
        Ok(MarginReport::compute(self.margins.hospitals.clone(), target, punishment, rewards))
    }

    /// Fraction of `periods` on-path periods in which each tier hospital
    /// hires fewer than its quota.
    pub fn reduced_capacity_frequency<R: Rng + ?Sized>(&self, periods: usize, rng: &mut R) -> Vec<f64> {
        let path = simulate_on_path(&self.automaton, periods, rng);
        self.hospitals
            .iter()
            .map(|f| {
                let q = self.cohorts[0].spec.quota(*f);
                let short = path
                    .iter()
                    .filter(|p| self.automaton.realizations[p.realization].matching.members(*f).len() < q)
                    .count();
                short as f64 / periods.max(1) as f64
            })
            .collect()
    }
}

type RegimeRow = (HospitalId, String, Lottery<usize, f64>, Lottery<usize, f64>);

struct CohortMatchings {
    reduced: Matching,
    reward: Matching,
    punish: Vec<Matching>,
    zero: Vec<Matching>,
}

/// Fails with the measured margins unless every payoff ordering the
/// construction relies on holds.
pub fn build_capacity_process(cohorts: Vec<RealizedMarket>, opts: CapacityOptions) -> Result<CapacityProcess, FolkError> {
    let p = build_capacity_process_unchecked(cohorts, opts)?;
    if !p.margins.is_positive() {
        return Err(FolkError::Margins(Box::new(p.margins)));
    }
    Ok(p)
}

/// The same automaton without the margin requirement, for auditing
/// processes that are not expected to be self-enforcing (an elite tier,
/// say). The margins are still reported.
pub fn build_capacity_process_unchecked(
    cohorts: Vec<RealizedMarket>,
    opts: CapacityOptions,
) -> Result<CapacityProcess, FolkError> {
    for (name, p) in [("p0", opts.p0), ("pr", opts.pr)] {
        if !(p > 0.0 && p < 1.0) {
            return Err(FolkError::Input(format!("{name} must lie in (0, 1), got {p}")));
        }
    }
    if opts.punishment_length == Some(0) {
        return Err(FolkError::Input("punishment length must be positive".into()));
    }
    let first = cohorts.first().ok_or_else(|| FolkError::Input("at least one cohort is required".into()))?;
    let hospitals = first.hospitals_in(opts.tier);
    let k = first
        .layered_tier(opts.tier)
        .ok_or_else(|| FolkError::Input(format!("hospital tier {} is empty at this size", opts.tier)))?;
    if cohorts.iter().any(|c| c.hospitals_in(opts.tier) != hospitals || !c.spec.same_players(&first.spec)) {
        return Err(FolkError::Input("cohorts must share the same hospitals and tiers".into()));
    }

    let per_cohort: Vec<CohortMatchings> = cohorts
        .iter()
        .enumerate()
        .map(|(c, market)| {
            let seat_seed: u64 = trial_rng(opts.seed, REWARD_STREAM + c as u64).random();
            let run = |rule: InnerRule| layered_matching(&market.spec, &market.tiers, k, &rule);
            Ok(CohortMatchings {
                reduced: run(InnerRule::ReducedCapacity)?,
                reward: run(InnerRule::Rsd(SeatOrder::Seeded(seat_seed)))?,
                punish: hospitals.iter().map(|f| run(InnerRule::Punitive(*f))).collect::<Result<_, _>>()?,
                zero: hospitals.iter().map(|f| run(InnerRule::ZeroQuota(*f))).collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<_, FolkError>>()?;

    let mut a: Automaton = ProcessAutomaton::new("capacity", opts.discount);
    let share = 1.0 / cohorts.len() as f64;
    let mut normal = Vec::new();
    for (c, m) in per_cohort.iter().enumerate() {
        normal.push((a.add_realization(format!("c{c}_reduced"), c, m.reduced.clone()), share * opts.p0));
        normal.push((a.add_realization(format!("c{c}_reward"), c, m.reward.clone()), share * (1.0 - opts.p0)));
    }
    let normal = Lottery::new(normal)?;
    let mut regimes: Vec<RegimeRow> = Vec::with_capacity(hospitals.len());
    for (i, f) in hospitals.iter().enumerate() {
        let name = first.spec.hospital_name(*f).to_string();
        let mut zero = Vec::new();
        let mut punish = Vec::new();
        for (c, m) in per_cohort.iter().enumerate() {
            zero.push(a.add_realization(format!("c{c}_zero_{name}"), c, m.zero[i].clone()));
            punish.push(a.add_realization(format!("c{c}_punish_{name}"), c, m.punish[i].clone()));
        }
        let reward = normal.mix(&opts.pr, &Lottery::uniform(zero)?)?;
        regimes.push((*f, name, reward, Lottery::uniform(punish)?));
    }

    let specs: Vec<Market> = cohorts.iter().map(|c| c.spec.clone()).collect();
    let payoffs = |l: &Lottery<usize, f64>, f: HospitalId| {
        l.expectation(|r| {
            let real = &a.realizations[*r];
            specs[real.cohort].utility_of(f, real.matching.members(f))
        })
    };
    let margins = MarginReport::compute(
        regimes.iter().map(|(_, name, ..)| name.clone()).collect(),
        hospitals.iter().map(|f| payoffs(&normal, *f)).collect(),
        regimes.iter().map(|(f, _, _, p)| payoffs(p, *f)).collect(),
        hospitals.iter().map(|f| regimes.iter().map(|(_, _, r, _)| payoffs(r, *f)).collect()).collect(),
    );
    let length = match opts.punishment_length {
        Some(l) => l,
        None => sized_length(&specs, &a, &margins, &regimes),
    };
    assemble(&mut a, Regimes { normal, hospitals: regimes, length })?;
    check_outputs(&specs, &a, false)?;
    Ok(CapacityProcess { automaton: a, cohorts, hospitals, margins })
}

/// The larger of two lengths. The first is the asymptotic sizing rule: the
/// smallest `L` whose `L` periods of the smallest own margin exceed
/// `Z − (lowest stage payoff)`, with `Z` one above the best stage payoff
/// seen. The second is the same inequality at the actual discount factor,
/// `δ(1 − δ^L) (u_f(λᶠ) − u_f(m̲ᶠ)) > (1 − δ) g_f`, where `g_f` is the best
/// stage gain `f` has at any output of its reward regime; it is skipped
/// when no length satisfies it.
fn sized_length(specs: &[Market], a: &Automaton, margins: &MarginReport, regimes: &[RegimeRow]) -> usize {
    let mut best = 0.0f64;
    let mut lowest = f64::INFINITY;
    for r in &a.realizations {
        let spec = &specs[r.cohort];
        for f in spec.hospitals() {
            best = best.max(spec.utility_of(f, r.matching.members(f)));
        }
        for (f, ..) in regimes {
            lowest = lowest.min(spec.utility_of(*f, r.matching.members(*f)));
        }
    }
    let own: Vec<f64> = (0..regimes.len()).map(|i| margins.rewards[i][i] - margins.punishment[i]).collect();
    let smallest = own.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smallest > 0.0) {
        return 1;
    }
    let asymptotic = ((best + 1.0 - lowest) / smallest).floor() as usize + 1;

    let d = a.discount;
    let mut finite = 1usize;
    for (i, (f, _, reward, _)) in regimes.iter().enumerate() {
        let gain = reward
            .support()
            .map(|r| {
                let real = &a.realizations[*r];
                let spec = &specs[real.cohort];
                spec.best_response(*f, &real.matching).1 - spec.utility_of(*f, real.matching.members(*f))
            })
            .fold(0.0, f64::max);
        // 1 − δ^L > (1 − δ) g / (δ m)
        let need = (1.0 - d) * gain / (d * own[i]);
        if need >= 1.0 {
            return asymptotic;
        }
        if need > 0.0 {
            finite = finite.max(((1.0 - need).ln() / d.ln()).floor() as usize + 1);
        }
    }
    asymptotic.max(finite).max(1)
}
