use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use folk_constructions::{
    build_capacity_process, build_folk_automaton, build_trigger_process, find_player_specific_punishments,
    lottery_value, sample_cohorts, CapacityOptions, FolkError, SchemeOptions,
};
use large_market::{fixtures, trial_rng, TierConfig};
use market_core::{write_market_document, write_matching, BigRational, Cohort, MarketDocument, Scalar};
use repeated_core::{write_automaton, ProcessAutomaton, Lottery};
use serde_json::json;

use crate::common::{emit, load_document, parse_scalar, pretty, scalar_json, Negative, Outcome};
use crate::manifest::RunManifest;

/// Seeds the on-path simulation, apart from market and reward streams.
const PATH_STREAM: u64 = 1 << 41;

#[derive(clap::Subcommand)]
pub enum Kind {
    /// Two-state trigger process: target until anyone deviates, then fallback forever.
    Trigger {
        #[arg(long)]
        market: PathBuf,
        /// Named matching from the market file.
        #[arg(long)]
        target: String,
        /// Named stable matching from the market file.
        #[arg(long)]
        fallback: String,
        #[arg(long, default_value = "0.8")]
        delta: String,
        #[arg(long, default_value = "trigger")]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Folk-theorem automaton with player-specific punishments.
    Folk {
        #[arg(long)]
        market: PathBuf,
        /// Named matching played on path.
        #[arg(long)]
        lambda0: String,
        #[arg(long, default_value = "0.95")]
        delta: String,
        /// Punishment length; the sizing rule when absent.
        #[arg(long = "L")]
        length: Option<usize>,
        /// Search for a scheme the checker accepts at `--delta`.
        #[arg(long)]
        discount_aware: bool,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long, default_value = "folk")]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Capacity-reducing process on sampled cohorts of a tiered market.
    Capacity {
        /// Tier config; the bundled single-tier config when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        tier: usize,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
        #[arg(long, default_value_t = 0.9)]
        pr: f64,
        #[arg(long = "L")]
        length: Option<usize>,
        #[arg(long, default_value_t = 0.95)]
        delta: f64,
        /// Sampled student cohorts the lotteries range over.
        #[arg(long, default_value_t = 32)]
        cohorts: usize,
        /// On-path periods simulated for the reduction frequency.
        #[arg(long, default_value_t = 10_000)]
        periods: usize,
        #[arg(long, env = "REPMATCH_SEED", default_value_t = 0)]
        seed: u64,
        /// Directory for capacity.market, capacity.automaton and capacity.json.
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(kind: Kind) -> Result<Outcome> {
    match kind {
        Kind::Trigger { exact: true, .. } | Kind::Folk { exact: true, .. } => run_typed::<BigRational>(kind),
        Kind::Trigger { .. } | Kind::Folk { .. } => run_typed::<f64>(kind),
        Kind::Capacity { config, n, tier, p0, pr, length, delta, cohorts, periods, seed, out } => {
            capacity(config.as_deref(), n, CapacityOptions { tier, p0, pr, punishment_length: length, discount: delta, seed }, cohorts, periods, &out)
        }
    }
}

fn run_typed<S: Scalar>(kind: Kind) -> Result<Outcome> {
    let mut man = RunManifest::new(None);
    match kind {
        Kind::Trigger { market, target, fallback, delta, name, out, .. } => {
            let doc = load_document::<S>(&mut man, &market)?;
            let (spec, cohort) = single(&doc)?;
            let d: S = parse_scalar(&delta, "delta")?;
            let mut a = build_trigger_process(spec, named(cohort, &target)?, named(cohort, &fallback)?, d)
                .map_err(folk_error)?;
            a.name = name;
            rename_realizations(&mut a, cohort);
            emit(out.as_deref(), &(man.comment() + &write_automaton(&a, &doc.cohorts)))?;
            Ok(Outcome::Positive)
        }
        Kind::Folk { market, lambda0, delta, length, discount_aware, budget, name, out, .. } => {
            let doc = load_document::<S>(&mut man, &market)?;
            let (spec, cohort) = single(&doc)?;
            let d: S = parse_scalar(&delta, "delta")?;
            let target = Lottery::point(named(cohort, &lambda0)?.clone());
            let opts = SchemeOptions {
                budget,
                punishment_length: length,
                discount: discount_aware.then(|| d.clone()),
                ..SchemeOptions::default()
            };
            let scheme = find_player_specific_punishments(spec, &target, opts).map_err(folk_error)?;
            let mut a = build_folk_automaton(spec, &scheme, d).map_err(folk_error)?;
            a.name = name;
            rename_realizations(&mut a, cohort);
            let hospitals: Vec<_> = scheme
                .hospitals
                .iter()
                .map(|p| {
                    let f = p.hospital;
                    json!({
                        "hospital": spec.hospital_name(f),
                        "target": scalar_json(&lottery_value(spec, f, &scheme.target)),
                        "own_reward": scalar_json(&lottery_value(spec, f, &p.lottery)),
                        "minmax_value": scalar_json(&p.minmax_value),
                        "minmax": write_matching(spec, &p.minmax),
                        "nu": write_matching(spec, &p.nu),
                        "weight": scalar_json(&p.weight),
                    })
                })
                .collect();
            let report = json!({ "punishment_length": scheme.punishment_length, "hospitals": hospitals });
            eprint!("{}", pretty(&report));
            emit(out.as_deref(), &(man.comment() + &write_automaton(&a, &doc.cohorts)))?;
            Ok(Outcome::Positive)
        }
        Kind::Capacity { .. } => unreachable!("capacity is f64 only"),
    }
}

fn single<S: Scalar>(doc: &MarketDocument<S>) -> Result<(&market_core::MarketSpec<S>, &Cohort<S>)> {
    if doc.cohorts.len() != 1 {
        bail!("this construction takes a single-cohort market file");
    }
    Ok((&doc.cohorts[0].spec, &doc.cohorts[0]))
}

fn named<'a, S: Scalar>(cohort: &'a Cohort<S>, name: &str) -> Result<&'a market_core::Matching> {
    cohort.matching(name).with_context(|| format!("the market file has no matching named `{name}`"))
}

/// Certificate failures are negative results; malformed requests are not.
fn folk_error(e: FolkError) -> anyhow::Error {
    match e {
        FolkError::NotFound(_) | FolkError::Margins(_) | FolkError::NonMonotone { .. } => Negative(e.to_string()).into(),
        other => other.into(),
    }
}

/// Realizations equal to a named matching of their cohort take its name.
fn rename_realizations<S: Scalar>(a: &mut ProcessAutomaton<S>, cohort: &Cohort<S>) {
    for i in 0..a.realizations.len() {
        let found = cohort.matchings.iter().find(|(_, m)| *m == a.realizations[i].matching);
        if let Some((name, _)) = found {
            if a.realizations.iter().all(|r| &r.name != name) {
                a.realizations[i].name = name.clone();
            }
        }
    }
}

fn capacity(
    config: Option<&Path>,
    n: usize,
    opts: CapacityOptions,
    count: usize,
    periods: usize,
    out: &Path,
) -> Result<Outcome> {
    let mut man = RunManifest::new(Some(opts.seed));
    let cfg = match config {
        Some(path) => TierConfig::from_toml(&man.read(path)?)?,
        None => {
            man.record("bundled:capacity.toml".into(), fixtures::CAPACITY);
            fixtures::capacity()
        }
    };
    let cohorts = sample_cohorts(&cfg, n, count, opts.seed)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let summary = out.join("capacity.json");
    let p = match build_capacity_process(cohorts, opts) {
        Ok(p) => p,
        Err(FolkError::Margins(m)) => {
            let report = json!({ "manifest": man.json(), "certificate": "FAIL", "margins": margins_json(&m) });
            emit(Some(&summary), &pretty(&report))?;
            return Err(Negative(format!("capacity margins are not positive:\n{m}")).into());
        }
        Err(e) => return Err(e.into()),
    };

    let doc = MarketDocument {
        cohorts: p
            .cohorts
            .iter()
            .enumerate()
            .map(|(c, m)| Cohort { name: Some(format!("c{c}")), spec: m.spec.clone(), matchings: Vec::new() })
            .collect(),
    };
    emit(Some(&out.join("capacity.market")), &(man.comment() + &write_market_document(&doc)))?;
    emit(Some(&out.join("capacity.automaton")), &(man.comment() + &write_automaton(&p.automaton, &doc.cohorts)))?;
    let freq = p.reduced_capacity_frequency(periods, &mut trial_rng(opts.seed, PATH_STREAM));
    let mean = freq.iter().sum::<f64>() / freq.len() as f64;
    let report = json!({
        "manifest": man.json(),
        "certificate": "PASS",
        "punishment_length": p.punishment_length(),
        "states": p.automaton.num_states(),
        "realizations": p.automaton.realizations.len(),
        "margins": margins_json(&p.margins),
        "on_path_periods": periods,
        "reduced_frequency_mean": mean,
        "reduced_frequency_min": freq.iter().copied().fold(f64::INFINITY, f64::min),
        "reduced_frequency_max": freq.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    });
    emit(Some(&summary), &pretty(&report))?;
    Ok(Outcome::Positive)
}

fn margins_json(m: &folk_constructions::MarginReport) -> serde_json::Value {
    let finite = |x: f64| if x.is_finite() { json!(x) } else { serde_json::Value::Null };
    json!({
        "above_punishment": finite(m.above_punishment),
        "below_target": finite(m.below_target),
        "below_others": finite(m.below_others),
        "hospitals": m.hospitals,
        "target": m.target,
        "punishment": m.punishment,
        "own_reward": (0..m.target.len()).map(|i| m.rewards[i][i]).collect::<Vec<_>>(),
    })
}
