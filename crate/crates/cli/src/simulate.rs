use std::path::PathBuf;

use anyhow::{Context, Result};
use folk_constructions::{build_capacity_process_unchecked, elite_deviation_audit, sample_cohorts, CapacityOptions};
use large_market::{fixtures, Experiment, StatRow, TierConfig};
use serde_json::json;

use crate::common::{pretty, Outcome};
use crate::manifest::RunManifest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Name {
    Fill,
    Rank,
    Gap,
    Clustering,
    Nodev,
    Eliteaudit,
}

#[derive(clap::Args)]
pub struct Args {
    experiment: Name,
    /// Tier config. Defaults to the bundled elite config for `fill` and
    /// `eliteaudit`, and to one tier with unit quotas otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, env = "REPMATCH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// eliteaudit: sampled cohorts behind the audited process.
    #[arg(long, default_value_t = 16)]
    cohorts: usize,
    /// eliteaudit: discount factor.
    #[arg(long, default_value_t = 0.8)]
    delta: f64,
    /// eliteaudit: how far below `C₁ + 1` a plan's students may fall.
    #[arg(long, default_value_t = 1.0)]
    epsilon_tilde: f64,
}

impl Name {
    fn as_str(self) -> &'static str {
        match self {
            Name::Fill => "fill",
            Name::Rank => "rank",
            Name::Gap => "gap",
            Name::Clustering => "clustering",
            Name::Nodev => "nodev",
            Name::Eliteaudit => "eliteaudit",
        }
    }
}

pub fn run(args: Args) -> Result<Outcome> {
    let mut man = RunManifest::new(Some(args.seed));
    let name = args.experiment.as_str();
    let cfg = match &args.config {
        Some(path) => TierConfig::from_toml(&man.read(path)?)?,
        None if matches!(args.experiment, Name::Fill | Name::Eliteaudit) => {
            man.record("bundled:elite.toml".into(), fixtures::ELITE);
            fixtures::elite()
        }
        None => {
            let cfg = TierConfig::single_tier(1, 1.0);
            man.record("builtin:single-tier".into(), &cfg.to_toml());
            cfg
        }
    };

    let (rows, ok) = match args.experiment {
        Name::Eliteaudit => elite_audit(&cfg, &args)?,
        other => {
            let rows = other.as_str().parse::<Experiment>()?.run(&cfg, args.n, args.trials, args.seed)?;
            let ok = other != Name::Nodev || rows.iter().all(|r| r.statistic != "violations" || r.value == 0.0);
            (rows, ok)
        }
    };

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let csv_path = args.out.join(format!("{name}.csv"));
    let mut text = man.comment().into_bytes();
    {
        // Display gives the shortest round-trip form, and counts print bare.
        let mut w = csv::Writer::from_writer(&mut text);
        w.write_record(["experiment", "n", "trials", "statistic", "value", "stderr"])?;
        for r in &rows {
            let stderr = r.stderr.map(|e| e.to_string()).unwrap_or_default();
            w.write_record([&r.experiment, &r.n.to_string(), &r.trials.to_string(), &r.statistic, &r.value.to_string(), &stderr])?;
        }
        w.flush()?;
    }
    std::fs::write(&csv_path, text).with_context(|| format!("writing {}", csv_path.display()))?;

    let summary = json!({
        "manifest": man.json(),
        "experiment": name,
        "n": args.n,
        "trials": args.trials,
        "passed": ok,
        "rows": rows.iter().map(|r| json!({ "statistic": r.statistic, "value": r.value, "stderr": r.stderr })).collect::<Vec<_>>(),
    });
    let json_path = args.out.join(format!("{name}.json"));
    std::fs::write(&json_path, pretty(&summary)).with_context(|| format!("writing {}", json_path.display()))?;
    Ok(Outcome::from_bool(ok))
}

/// Audits the capacity-reducing process on the elite tier. The process is
/// built without its margin requirement: elite hospitals cannot be punished,
/// which is the point being demonstrated.
fn elite_audit(cfg: &TierConfig, args: &Args) -> Result<(Vec<StatRow>, bool)> {
    let cohorts = sample_cohorts(cfg, args.n, args.cohorts, args.seed)?;
    let opts = CapacityOptions { tier: 1, discount: args.delta, seed: args.seed, ..CapacityOptions::default() };
    let p = build_capacity_process_unchecked(cohorts, opts)?;
    let r = elite_deviation_audit(&p.cohorts, &p.automaton, args.delta, args.epsilon_tilde)?;
    let row = |stat: &str, value: f64| StatRow {
        experiment: "eliteaudit".into(),
        n: args.n,
        trials: args.cohorts,
        statistic: stat.into(),
        value,
        stderr: None,
    };
    let ok = !r.is_empty() && r.all_positive();
    let rows = vec![
        row("entries", r.entries.len() as f64),
        row("min_gain", r.min_gain().unwrap_or(f64::NAN)),
        row("slack", r.slack),
        row("positive_fraction", r.entries.iter().filter(|e| e.gain > 0.0).count() as f64 / r.entries.len().max(1) as f64),
        row("elite_margin_above_punishment", p.margins.above_punishment),
    ];
    Ok((rows, ok))
}
