//! Plain-text market files.
//!
//! ```text
//! # comments run to end of line
//! HOSPITALS
//! f1 2 : w1=5 w2=4 w3=3
//! STUDENTS
//! w1 : f1
//! w2 : f1
//! w3 :
//! MATCHINGS
//! m0 : f1={w1,w2}
//! ```
//!
//! A hospital line gives id, quota and one `student=value` entry per student;
//! values are decimals or ratios. A student line lists acceptable hospitals,
//! best first. Matching lines name rosters; omitted hospitals are empty.
//! Several markets sharing hospitals may be stacked, each opened by
//! `COHORT <name>`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::market::{HospitalId, HospitalSpec, Matching, MarketSpec, StudentId, StudentSpec};
use crate::scalar::Scalar;

/// One market of a file together with its named matchings.
#[derive(Clone, Debug)]
pub struct Cohort<S> {
    pub name: Option<String>,
    pub spec: MarketSpec<S>,
    pub matchings: Vec<(String, Matching)>,
}

impl<S: Scalar> Cohort<S> {
    pub fn matching(&self, name: &str) -> Option<&Matching> {
        self.matchings.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

/// Parsed contents of a market file.
#[derive(Clone, Debug)]
pub struct MarketDocument<S> {
    pub cohorts: Vec<Cohort<S>>,
}

impl<S: Scalar> MarketDocument<S> {
    pub fn single(spec: MarketSpec<S>) -> Self {
        MarketDocument { cohorts: vec![Cohort { name: None, spec, matchings: Vec::new() }] }
    }

    /// The first cohort; a file always has at least one.
    pub fn primary(&self) -> &Cohort<S> {
        &self.cohorts[0]
    }

    pub fn specs(&self) -> Vec<MarketSpec<S>> {
        self.cohorts.iter().map(|c| c.spec.clone()).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Hospitals,
    Students,
    Matchings,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &content[s..i], column: content[..s].chars().count() + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &content[s..], column: content[..s].chars().count() + 1 });
    }
    out
}

struct RawHospital<'a> {
    line: usize,
    name: Token<'a>,
    quota: usize,
    entries: Vec<(Token<'a>, String)>,
}

struct RawStudent<'a> {
    line: usize,
    name: Token<'a>,
    acceptable: Vec<Token<'a>>,
}

struct RawMatching<'a> {
    line: usize,
    name: Token<'a>,
    rosters: Vec<Token<'a>>,
}

#[derive(Default)]
struct RawCohort<'a> {
    name: Option<String>,
    line: usize,
    hospitals: Vec<RawHospital<'a>>,
    students: Vec<RawStudent<'a>>,
    matchings: Vec<RawMatching<'a>>,
}

fn expect_colon(line: usize, toks: &[Token<'_>], at: usize) -> Result<(), ParseError> {
    match toks.get(at) {
        Some(t) if t.text == ":" => Ok(()),
        Some(t) => Err(ParseError::new(line, t.column, format!("expected `:`, found `{}`", t.text))),
        None => Err(ParseError::new(line, 1, "expected `:`")),
    }
}

/// Parses a market file.
pub fn parse_market_document<S: Scalar>(text: &str) -> Result<MarketDocument<S>, ParseError> {
    let mut cohorts: Vec<RawCohort<'_>> = vec![RawCohort { line: 1, ..Default::default() }];
    let mut section = Section::None;
    let mut explicit_cohorts = false;
    for (index, line) in text.lines().enumerate() {
        let lineno = index + 1;
        let toks = tokens(line);
        let Some(first) = toks.first() else { continue };
        match first.text {
            "COHORT" => {
                let name = toks.get(1).ok_or_else(|| ParseError::new(lineno, first.column, "COHORT needs a name"))?;
                if let Some(extra) = toks.get(2) {
                    return Err(ParseError::new(lineno, extra.column, "unexpected text after cohort name"));
                }
                let current = cohorts.last().expect("at least one cohort");
                let untouched = !explicit_cohorts
                    && current.hospitals.is_empty()
                    && current.students.is_empty()
                    && current.matchings.is_empty();
                if !untouched && !explicit_cohorts {
                    return Err(ParseError::new(lineno, first.column, "COHORT must precede every section"));
                }
                if untouched {
                    cohorts.pop();
                }
                explicit_cohorts = true;
                cohorts.push(RawCohort { name: Some(name.text.to_string()), line: lineno, ..Default::default() });
                section = Section::None;
                continue;
            }
            "HOSPITALS" | "STUDENTS" | "MATCHINGS" => {
                if let Some(extra) = toks.get(1) {
                    return Err(ParseError::new(lineno, extra.column, "unexpected text after section header"));
                }
                section = match first.text {
                    "HOSPITALS" => Section::Hospitals,
                    "STUDENTS" => Section::Students,
                    _ => Section::Matchings,
                };
                continue;
            }
            _ => {}
        }
        let cohort = cohorts.last_mut().expect("at least one cohort");
        match section {
            Section::None => {
                return Err(ParseError::new(lineno, first.column, "expected HOSPITALS, STUDENTS, MATCHINGS or COHORT"));
            }
            Section::Hospitals => {
                let quota_tok = toks.get(1).ok_or_else(|| ParseError::new(lineno, first.column, "missing quota"))?;
                let quota: usize = quota_tok
                    .text
                    .parse()
                    .map_err(|_| ParseError::new(lineno, quota_tok.column, format!("invalid quota `{}`", quota_tok.text)))?;
                expect_colon(lineno, &toks, 2)?;
                let mut entries = Vec::new();
                for tok in &toks[3..] {
                    let (student, value) = tok
                        .text
                        .split_once('=')
                        .ok_or_else(|| ParseError::new(lineno, tok.column, "expected `student=value`"))?;
                    let name = Token { text: student, column: tok.column };
                    entries.push((name, value.to_string()));
                }
                cohort.hospitals.push(RawHospital { line: lineno, name: *first, quota, entries });
            }
            Section::Students => {
                expect_colon(lineno, &toks, 1)?;
                let acceptable = toks[2..].to_vec();
                cohort.students.push(RawStudent { line: lineno, name: *first, acceptable });
            }
            Section::Matchings => {
                expect_colon(lineno, &toks, 1)?;
                let rosters = toks[2..].to_vec();
                cohort.matchings.push(RawMatching { line: lineno, name: *first, rosters });
            }
        }
    }
    let mut out: Vec<Cohort<S>> = Vec::with_capacity(cohorts.len());
    for raw in cohorts {
        let line = raw.line;
        let cohort = build_cohort(raw)?;
        if let Some(first) = out.first() {
            if !first.spec.same_players(&cohort.spec) {
                return Err(ParseError::new(
                    line,
                    1,
                    format!(
                        "cohort `{}` does not share the hospitals of the first cohort",
                        cohort.name.as_deref().unwrap_or("")
                    ),
                ));
            }
        }
        out.push(cohort);
    }
    Ok(MarketDocument { cohorts: out })
}

fn build_cohort<S: Scalar>(raw: RawCohort<'_>) -> Result<Cohort<S>, ParseError> {
    let mut student_index: HashMap<&str, usize> = HashMap::new();
    for (i, w) in raw.students.iter().enumerate() {
        if student_index.insert(w.name.text, i).is_some() {
            return Err(ParseError::new(w.line, w.name.column, format!("duplicate student `{}`", w.name.text)));
        }
    }
    let mut hospital_index: HashMap<&str, usize> = HashMap::new();
    for (i, h) in raw.hospitals.iter().enumerate() {
        if hospital_index.insert(h.name.text, i).is_some() {
            return Err(ParseError::new(h.line, h.name.column, format!("duplicate hospital `{}`", h.name.text)));
        }
        if student_index.contains_key(h.name.text) {
            return Err(ParseError::new(h.line, h.name.column, format!("`{}` names both a hospital and a student", h.name.text)));
        }
    }
    let n = raw.students.len();
    let mut hospitals = Vec::with_capacity(raw.hospitals.len());
    for h in &raw.hospitals {
        if h.quota == 0 {
            return Err(ParseError::new(h.line, h.name.column, "quota must be positive"));
        }
        let mut row: Vec<Option<S>> = vec![None; n];
        let mut seen: Vec<(S, &str)> = Vec::new();
        for (tok, value) in &h.entries {
            let w = *student_index
                .get(tok.text)
                .ok_or_else(|| ParseError::new(h.line, tok.column, format!("unknown student `{}`", tok.text)))?;
            let value_column = tok.column + tok.text.chars().count() + 1;
            let u = S::parse_literal(value)
                .ok_or_else(|| ParseError::new(h.line, value_column, format!("invalid number `{value}`")))?;
            if u <= S::zero() {
                return Err(ParseError::new(h.line, value_column, "utilities must be positive"));
            }
            if let Some((_, other)) = seen.iter().find(|(v, _)| *v == u) {
                return Err(ParseError::new(
                    h.line,
                    value_column,
                    format!("duplicate utility {u} for `{}` and `{other}`", tok.text),
                ));
            }
            seen.push((u.clone(), tok.text));
            if row[w].replace(u).is_some() {
                return Err(ParseError::new(h.line, tok.column, format!("student `{}` listed twice", tok.text)));
            }
        }
        let mut utilities = Vec::with_capacity(n);
        for (w, u) in row.into_iter().enumerate() {
            utilities.push(u.ok_or_else(|| {
                ParseError::new(h.line, h.name.column, format!("missing utility for student `{}`", raw.students[w].name.text))
            })?);
        }
        hospitals.push(HospitalSpec { name: h.name.text.to_string(), quota: h.quota, utilities });
    }
    let mut students = Vec::with_capacity(n);
    for w in &raw.students {
        let mut acceptable = Vec::with_capacity(w.acceptable.len());
        for tok in &w.acceptable {
            let f = *hospital_index
                .get(tok.text)
                .ok_or_else(|| ParseError::new(w.line, tok.column, format!("unknown hospital `{}`", tok.text)))?;
            if acceptable.contains(&HospitalId(f)) {
                return Err(ParseError::new(w.line, tok.column, format!("hospital `{}` listed twice", tok.text)));
            }
            acceptable.push(HospitalId(f));
        }
        students.push(StudentSpec { name: w.name.text.to_string(), acceptable });
    }
    let spec = MarketSpec::new(hospitals, students).map_err(|e| ParseError::new(raw.line, 1, e.to_string()))?;
    let mut matchings: Vec<(String, Matching)> = Vec::new();
    for m in &raw.matchings {
        if matchings.iter().any(|(name, _)| name == m.name.text) {
            return Err(ParseError::new(m.line, m.name.column, format!("duplicate matching `{}`", m.name.text)));
        }
        let matching = parse_rosters(&spec, &m.rosters).map_err(|(column, msg)| ParseError::new(m.line, column, msg))?;
        matchings.push((m.name.text.to_string(), matching));
    }
    Ok(Cohort { name: raw.name, spec, matchings })
}

fn parse_rosters<S: Scalar>(spec: &MarketSpec<S>, rosters: &[Token<'_>]) -> Result<Matching, (usize, String)> {
    let mut sets: Vec<(HospitalId, Vec<StudentId>)> = Vec::new();
    for tok in rosters {
        let (hospital, rest) = tok.text.split_once('=').ok_or((tok.column, "expected `hospital={...}`".to_string()))?;
        let f = spec.hospital_by_name(hospital).ok_or((tok.column, format!("unknown hospital `{hospital}`")))?;
        if sets.iter().any(|(g, _)| *g == f) {
            return Err((tok.column, format!("hospital `{hospital}` listed twice")));
        }
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or((tok.column, "roster must be written `{w1,w2}`".to_string()))?;
        let mut set = Vec::new();
        for name in inner.split(',').filter(|s| !s.is_empty()) {
            let w = spec.student_by_name(name).ok_or((tok.column, format!("unknown student `{name}`")))?;
            set.push(w);
        }
        sets.push((f, set));
    }
    Matching::from_sets(spec, &sets).map_err(|e| (1, e.to_string()))
}

/// Parses an inline matching such as `f1={w1,w5} f2={w3,w4}`.
pub fn parse_matching<S: Scalar>(spec: &MarketSpec<S>, text: &str) -> Result<Matching, ParseError> {
    let toks = tokens(text);
    parse_rosters(spec, &toks).map_err(|(column, msg)| ParseError::new(1, column, msg))
}

/// Canonical inline form listing every hospital in id order.
pub fn write_matching<S: Scalar>(spec: &MarketSpec<S>, m: &Matching) -> String {
    let mut out = String::new();
    for f in spec.hospitals() {
        if f.0 > 0 {
            out.push(' ');
        }
        let names: Vec<&str> = m.members(f).iter().map(|w| spec.student_name(*w)).collect();
        let _ = write!(out, "{}={{{}}}", spec.hospital_name(f), names.join(","));
    }
    out
}

/// Canonical text of a single market section group.
fn write_cohort<S: Scalar>(out: &mut String, cohort: &Cohort<S>) {
    let spec = &cohort.spec;
    out.push_str("HOSPITALS\n");
    for f in spec.hospitals() {
        let _ = write!(out, "{} {} :", spec.hospital_name(f), spec.quota(f));
        for w in spec.students() {
            let _ = write!(out, " {}={}", spec.student_name(w), spec.utility(f, w));
        }
        out.push('\n');
    }
    out.push_str("STUDENTS\n");
    for w in spec.students() {
        let _ = write!(out, "{} :", spec.student_name(w));
        for f in spec.acceptable(w) {
            let _ = write!(out, " {}", spec.hospital_name(*f));
        }
        out.push('\n');
    }
    if !cohort.matchings.is_empty() {
        out.push_str("MATCHINGS\n");
        for (name, m) in &cohort.matchings {
            let _ = writeln!(out, "{name} : {}", write_matching(spec, m));
        }
    }
}

/// Canonical serialization; parsing it yields the same document.
pub fn write_market_document<S: Scalar>(doc: &MarketDocument<S>) -> String {
    let mut out = String::new();
    let stacked = doc.cohorts.len() > 1 || doc.cohorts.iter().any(|c| c.name.is_some());
    for (i, cohort) in doc.cohorts.iter().enumerate() {
        if stacked {
            let default_name = format!("c{i}");
            let _ = writeln!(out, "COHORT {}", cohort.name.as_deref().unwrap_or(&default_name));
        }
        write_cohort(&mut out, cohort);
    }
    out
}
