use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use folk_constructions::{min_delta_bisect, BisectOutcome};
use market_core::{BigRational, MarketDocument, Scalar};
use repeated_core::{check_self_enforcing_cohorts, parse_automaton, ProcessAutomaton, ScanMode, Witness};
use serde_json::{json, Value};

use crate::common::{load_document, parse_scalar, pretty, scalar_json, Outcome};
use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    market: PathBuf,
    #[arg(long)]
    automaton: PathBuf,
    /// Overrides the automaton's DISCOUNT; decimal or ratio.
    #[arg(long)]
    delta: Option<String>,
    /// Locate the smallest passing discount factor instead.
    #[arg(long)]
    bisect: bool,
    /// Bisection tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Bisection bracket.
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 0.999)]
    hi: f64,
    /// Try every feasible deviation set instead of one per hospital.
    #[arg(long)]
    brute_force: bool,
    #[arg(long)]
    exact: bool,
}

pub fn run(args: Args) -> Result<Outcome> {
    let mut man = RunManifest::new(None);
    if args.exact {
        let doc = load_document::<BigRational>(&mut man, &args.market)?;
        check(&args, &mut man, &doc)
    } else {
        let doc = load_document::<f64>(&mut man, &args.market)?;
        check(&args, &mut man, &doc)
    }
}

fn check<S: Scalar>(args: &Args, man: &mut RunManifest, doc: &MarketDocument<S>) -> Result<Outcome> {
    let text = man.read(&args.automaton)?;
    let mut a: ProcessAutomaton<S> =
        parse_automaton(&text, &doc.cohorts).with_context(|| format!("parsing {}", args.automaton.display()))?;
    let specs = doc.specs();
    let mode = if args.brute_force { ScanMode::BruteForce } else { ScanMode::Pruned };
    let mut report = json!({ "manifest": man.json(), "automaton": a.name });
    let mut ok = true;

    if let Some(d) = &args.delta {
        let d: S = parse_scalar(d, "delta")?;
        if d < S::zero() || d >= S::one() {
            bail!("delta must lie in [0, 1), got {d}");
        }
        a = a.with_discount(d);
    }
    if !args.bisect || args.delta.is_some() {
        let verdict = check_self_enforcing_cohorts(&specs, &a, mode)?;
        ok &= verdict.is_self_enforcing();
        report["discount"] = scalar_json(&a.discount);
        report["verdict"] = json!(if verdict.is_self_enforcing() { "PASS" } else { "FAIL" });
        report["witness"] = verdict.witness.as_ref().map_or(Value::Null, |w| witness_json(doc, &a, w));
    }
    if args.bisect {
        // The family varies only the discount factor.
        let outcome = min_delta_bisect(&specs, |d| Ok(a.clone().with_discount(d)), args.lo, args.hi, args.tol)?;
        report["bisect"] = match outcome {
            BisectOutcome::Threshold { delta, lower, upper } => {
                json!({ "delta_star": delta, "lower": lower, "upper": upper, "tol": args.tol })
            }
            BisectOutcome::PassesEverywhere => json!({ "passes_everywhere": true, "lo": args.lo }),
            BisectOutcome::NeverPasses => {
                ok = false;
                json!({ "never_passes": true, "hi": args.hi })
            }
        };
    }
    print!("{}", pretty(&report));
    Ok(Outcome::from_bool(ok))
}

fn witness_json<S: Scalar>(doc: &MarketDocument<S>, a: &ProcessAutomaton<S>, w: &Witness<S>) -> Value {
    match w {
        Witness::Student { state, realization, student, hospital } => {
            let spec = &doc.cohorts[a.realizations[*realization].cohort].spec;
            json!({
                "kind": "student",
                "state": a.states[*state].name,
                "realization": a.realizations[*realization].name,
                "student": spec.student_name(*student),
                "hospital": spec.hospital_name(*hospital),
            })
        }
        Witness::Hospital { state, realization, hospital, students, gain, deviation_value, compliance_value } => {
            let spec = &doc.cohorts[a.realizations[*realization].cohort].spec;
            json!({
                "kind": "hospital",
                "state": a.states[*state].name,
                "realization": a.realizations[*realization].name,
                "hospital": spec.hospital_name(*hospital),
                "students": students.iter().map(|s| spec.student_name(*s)).collect::<Vec<_>>(),
                "gain": scalar_json(gain),
                "deviation_value": scalar_json(deviation_value),
                "compliance_value": scalar_json(compliance_value),
            })
        }
    }
}
