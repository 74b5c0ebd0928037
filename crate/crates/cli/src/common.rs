use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use market_core::{parse_market_document, MarketDocument, Scalar};

use crate::manifest::RunManifest;

pub enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }
}

/// A well-formed request whose answer is negative; exits with status 1.
#[derive(Debug)]
pub struct Negative(pub String);

impl fmt::Display for Negative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Negative {}

pub fn load_document<S: Scalar>(man: &mut RunManifest, path: &Path) -> Result<MarketDocument<S>> {
    let text = man.read(path)?;
    parse_market_document(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_scalar<S: Scalar>(text: &str, what: &str) -> Result<S> {
    S::parse_literal(text).with_context(|| format!("{what} `{text}` is not a number"))
}

/// Scalars as JSON numbers, or as exact strings for rationals.
pub fn scalar_json<S: Scalar>(x: &S) -> serde_json::Value {
    if S::is_exact() {
        serde_json::Value::String(x.to_string())
    } else {
        serde_json::json!(x.to_f64_lossy())
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}
