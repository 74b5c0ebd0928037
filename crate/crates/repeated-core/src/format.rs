//! Automaton text format.
//!
//! ```text
//! AUTOMATON mu0
//! DISCOUNT 4/5
//! MATCHING m0 : f1={w1,w2} f2={w3,w4} fr={}
//! MATCHING alt @1 : f1={w1} f2={} fr={}
//! INITIAL on=1
//!
//! STATE on
//!   OUTPUT 1 m0
//!   ONPATH on=1
//!   DEVIATION * off=1
//! ```
//!
//! `MATCHING` lines define realizations, `@c` naming the cohort (default 0).
//! `OUTPUT` may also name a matching from the market file, written
//! `name` or `name@c`. Transition rows are `state=weight` lists; `DEVIATION`
//! takes a hospital name or `*`, and `DEFAULT` covers unattributable
//! outcomes (absent: stay). Weights and the discount are decimals or ratios.
//! `#` starts a comment.

use std::fmt::Write as _;

use market_core::{parse_matching, write_matching, Cohort, HospitalId, Matching, ParseError, Scalar};

use crate::{Lottery, ProcessAutomaton, State};

struct Line<'a> {
    number: usize,
    words: Vec<(&'a str, usize)>,
    text: &'a str,
}

fn words(text: &str) -> Vec<(&str, usize)> {
    let content = text.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((&content[s..i], s + 1));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((&content[s..], s + 1));
    }
    out
}

#[derive(Default)]
struct RawState<'a> {
    line: usize,
    name: &'a str,
    outputs: Vec<(usize, usize, &'a str, &'a str)>,
    onpath: Option<(usize, Vec<(&'a str, usize)>)>,
    deviation: Vec<(usize, (&'a str, usize), Vec<(&'a str, usize)>)>,
    default: Option<(usize, Vec<(&'a str, usize)>)>,
}

fn scalar<S: Scalar>(line: usize, (text, column): (&str, usize)) -> Result<S, ParseError> {
    S::parse_literal(text).ok_or_else(|| ParseError::new(line, column, format!("invalid number `{text}`")))
}

fn lottery<S: Scalar>(
    line: usize,
    entries: &[(&str, usize)],
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Lottery<usize, S>, ParseError> {
    if entries.is_empty() {
        return Err(ParseError::new(line, 1, "expected `state=weight` entries"));
    }
    let mut out = Vec::new();
    for &(text, column) in entries {
        let (name, weight) =
            text.rsplit_once('=').ok_or_else(|| ParseError::new(line, column, "expected `state=weight`"))?;
        let target = resolve(name).ok_or_else(|| ParseError::new(line, column, format!("unknown state `{name}`")))?;
        out.push((target, scalar::<S>(line, (weight, column + name.len() + 1))?));
    }
    Lottery::new(out).map_err(|e| ParseError::new(line, entries[0].1, e.to_string()))
}

/// Parses an automaton against the cohorts of its market file. Structural
/// checks that need only the text are done here; call
/// [`ProcessAutomaton::validate`] for the rest.
pub fn parse_automaton<S: Scalar>(text: &str, cohorts: &[Cohort<S>]) -> Result<ProcessAutomaton<S>, ParseError> {
    let lines: Vec<Line<'_>> = text
        .lines()
        .enumerate()
        .map(|(i, t)| Line { number: i + 1, words: words(t), text: t })
        .filter(|l| !l.words.is_empty())
        .collect();
    if cohorts.is_empty() {
        return Err(ParseError::new(1, 1, "automaton needs at least one market cohort"));
    }
    let mut name: Option<String> = None;
    let mut discount: Option<S> = None;
    let mut initial: Option<(usize, Vec<(&str, usize)>)> = None;
    let mut realizations: Vec<(String, usize, Matching)> = Vec::new();
    let mut states: Vec<RawState<'_>> = Vec::new();

    for line in &lines {
        let n = line.number;
        let (keyword, kcol) = line.words[0];
        let rest = &line.words[1..];
        let in_state = !states.is_empty();
        let need = |count: usize| -> Result<(), ParseError> {
            if rest.len() < count {
                Err(ParseError::new(n, kcol, format!("`{keyword}` needs more arguments")))
            } else {
                Ok(())
            }
        };
        match keyword {
            "AUTOMATON" if !in_state => {
                need(1)?;
                name = Some(rest[0].0.to_string());
            }
            "DISCOUNT" if !in_state => {
                need(1)?;
                discount = Some(scalar(n, rest[0])?);
            }
            "MATCHING" if !in_state => {
                need(2)?;
                let (mname, mcol) = rest[0];
                let (cohort, colon_at) = match rest[1].0.strip_prefix('@') {
                    Some(c) => {
                        let c: usize = c.parse().map_err(|_| ParseError::new(n, rest[1].1, "invalid cohort index"))?;
                        (c, 2)
                    }
                    None => (0, 1),
                };
                match rest.get(colon_at) {
                    Some((":", _)) => {}
                    _ => return Err(ParseError::new(n, mcol, "expected `MATCHING name [@cohort] : rosters`")),
                }
                let spec = &cohorts
                    .get(cohort)
                    .ok_or_else(|| ParseError::new(n, rest[1].1, format!("no cohort {cohort} in the market file")))?
                    .spec;
                if realizations.iter().any(|(r, _, _)| r == mname) {
                    return Err(ParseError::new(n, mcol, format!("duplicate matching `{mname}`")));
                }
                let body_col = rest.get(colon_at + 1).map_or(line.text.len() + 1, |w| w.1);
                let body = &line.text[body_col - 1..];
                let m = parse_matching(spec, body.split('#').next().unwrap_or(""))
                    .map_err(|e| ParseError::new(n, body_col + e.column - 1, e.message))?;
                realizations.push((mname.to_string(), cohort, m));
            }
            "INITIAL" if !in_state => initial = Some((n, rest.to_vec())),
            "STATE" => {
                need(1)?;
                if states.iter().any(|s| s.name == rest[0].0) {
                    return Err(ParseError::new(n, rest[0].1, format!("duplicate state `{}`", rest[0].0)));
                }
                states.push(RawState { line: n, name: rest[0].0, ..Default::default() });
            }
            "OUTPUT" if in_state => {
                need(2)?;
                states.last_mut().unwrap().outputs.push((n, rest[0].1, rest[0].0, rest[1].0));
            }
            "ONPATH" if in_state => states.last_mut().unwrap().onpath = Some((n, rest.to_vec())),
            "DEFAULT" if in_state => states.last_mut().unwrap().default = Some((n, rest.to_vec())),
            "DEVIATION" if in_state => {
                need(2)?;
                states.last_mut().unwrap().deviation.push((n, rest[0], rest[1..].to_vec()));
            }
            _ => return Err(ParseError::new(n, kcol, format!("unexpected `{keyword}`"))),
        }
    }

    let name = name.ok_or_else(|| ParseError::new(1, 1, "missing `AUTOMATON name`"))?;
    let discount = discount.unwrap_or_else(S::zero);
    if states.is_empty() {
        return Err(ParseError::new(lines.last().map_or(1, |l| l.number), 1, "automaton has no states"));
    }
    let spec0 = &cohorts[0].spec;
    let mut a = ProcessAutomaton::new(name, discount);
    for (rname, cohort, m) in realizations {
        a.realizations.push(crate::Realization { name: rname, cohort, matching: m });
    }
    let state_names: Vec<&str> = states.iter().map(|s| s.name).collect();
    let resolve = |s: &str| state_names.iter().position(|n| *n == s);

    for raw in &states {
        let mut outputs = Vec::new();
        for &(n, wcol, weight, target) in &raw.outputs {
            let weight: S = scalar(n, (weight, wcol))?;
            let r = match a.realization_by_name(target) {
                Some(r) => r,
                None => {
                    let (base, cohort) = match target.rsplit_once('@') {
                        Some((b, c)) => (b, c.parse::<usize>().ok()),
                        None => (target, Some(0)),
                    };
                    let m = cohort
                        .and_then(|c| cohorts.get(c).and_then(|co| co.matching(base)).map(|m| (c, m.clone())))
                        .ok_or_else(|| ParseError::new(n, wcol, format!("unknown matching `{target}`")))?;
                    a.add_realization(target, m.0, m.1)
                }
            };
            outputs.push((r, weight));
        }
        if outputs.is_empty() {
            return Err(ParseError::new(raw.line, 1, format!("state `{}` has no OUTPUT", raw.name)));
        }
        let output = Lottery::new(outputs).map_err(|e| ParseError::new(raw.line, 1, e.to_string()))?;
        let (on_line, on_entries) =
            raw.onpath.as_ref().ok_or_else(|| ParseError::new(raw.line, 1, format!("state `{}` has no ONPATH", raw.name)))?;
        let onpath = lottery(*on_line, on_entries, &resolve)?;
        let mut state = State::new(raw.name, output, onpath);
        for (n, (who, wcol), entries) in &raw.deviation {
            let row = lottery(*n, entries, &resolve)?;
            if *who == "*" {
                if state.deviation_any.replace(row).is_some() {
                    return Err(ParseError::new(*n, *wcol, "duplicate `DEVIATION *`"));
                }
            } else {
                let f: HospitalId = spec0
                    .hospital_by_name(who)
                    .ok_or_else(|| ParseError::new(*n, *wcol, format!("unknown hospital `{who}`")))?;
                if state.deviation.iter().any(|(g, _)| *g == f) {
                    return Err(ParseError::new(*n, *wcol, format!("duplicate `DEVIATION {who}`")));
                }
                state.deviation.push((f, row));
            }
        }
        if let Some((n, entries)) = &raw.default {
            state.default = Some(lottery(*n, entries, &resolve)?);
        }
        a.add_state(state);
    }
    if let Some((n, entries)) = initial {
        a.initial = lottery(n, &entries, &resolve)?;
    }
    Ok(a)
}

fn write_row<S: Scalar>(out: &mut String, keyword: &str, a: &ProcessAutomaton<S>, l: &Lottery<usize, S>) {
    out.push_str(keyword);
    for (s, w) in l.iter() {
        let _ = write!(out, " {}={}", a.states[*s].name, w);
    }
    out.push('\n');
}

/// Canonical text: every realization inline, states in index order.
pub fn write_automaton<S: Scalar>(a: &ProcessAutomaton<S>, cohorts: &[Cohort<S>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "AUTOMATON {}", a.name);
    let _ = writeln!(out, "DISCOUNT {}", a.discount);
    for r in &a.realizations {
        let spec = &cohorts[r.cohort].spec;
        match r.cohort {
            0 => {
                let _ = writeln!(out, "MATCHING {} : {}", r.name, write_matching(spec, &r.matching));
            }
            c => {
                let _ = writeln!(out, "MATCHING {} @{c} : {}", r.name, write_matching(spec, &r.matching));
            }
        }
    }
    write_row(&mut out, "INITIAL", a, &a.initial);
    let spec0 = &cohorts[0].spec;
    for s in &a.states {
        let _ = writeln!(out, "\nSTATE {}", s.name);
        for (r, w) in s.output.iter() {
            let _ = writeln!(out, "  OUTPUT {w} {}", a.realizations[*r].name);
        }
        write_row(&mut out, "  ONPATH", a, &s.onpath);
        for (f, l) in &s.deviation {
            write_row(&mut out, &format!("  DEVIATION {}", spec0.hospital_name(*f)), a, l);
        }
        if let Some(l) = &s.deviation_any {
            write_row(&mut out, "  DEVIATION *", a, l);
        }
        if let Some(l) = &s.default {
            write_row(&mut out, "  DEFAULT", a, l);
        }
    }
    out
}
