//! Numeric types usable as utilities, discount factors and lottery weights.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field of payoff values: `f32`, `f64` or exact `BigRational`.
pub trait Scalar:
    Num + Signed + FromPrimitive + ToPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Slack used when deciding whether a deviation is profitable.
    fn payoff_tolerance() -> Self;

    /// Slack used when checking that lottery weights sum to one.
    fn lottery_tolerance() -> Self;

    /// True when arithmetic is exact, so iterative solvers must not be used.
    fn is_exact() -> bool {
        false
    }

    /// Parses a decimal (`0.25`, `-3`, `1e-3`) or a ratio (`3/4`).
    fn parse_literal(text: &str) -> Option<Self>;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite value")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn parse_float_literal(text: &str) -> Option<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            num / den
        }
        None => text.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

impl Scalar for f64 {
    fn payoff_tolerance() -> Self {
        1e-9
    }
    fn lottery_tolerance() -> Self {
        1e-12
    }
    fn parse_literal(text: &str) -> Option<Self> {
        parse_float_literal(text)
    }
}

impl Scalar for f32 {
    fn payoff_tolerance() -> Self {
        1e-4
    }
    fn lottery_tolerance() -> Self {
        1e-6
    }
    fn parse_literal(text: &str) -> Option<Self> {
        parse_float_literal(text).map(|x| x as f32)
    }
}

impl Scalar for BigRational {
    fn payoff_tolerance() -> Self {
        BigRational::zero()
    }
    fn lottery_tolerance() -> Self {
        BigRational::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num = parse_decimal(num.trim())?;
            let den = parse_decimal(den.trim())?;
            return (!den.is_zero()).then(|| num / den);
        }
        parse_decimal(text)
    }
    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value")
    }
}

/// Exact value of a decimal literal with optional sign, fraction and exponent.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Sum of an iterator of scalars.
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Converts a count to a scalar.
pub fn from_count<S: Scalar>(n: usize) -> S {
    S::from_usize(n).unwrap_or_else(S::one)
}

/// `a > b + tolerance`.
pub fn exceeds<S: Scalar>(a: &S, b: &S, tolerance: &S) -> bool {
    *a > b.clone() + tolerance.clone()
}
