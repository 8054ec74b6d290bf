use num_bigint::BigInt;
use num_traits::Zero;
use serde::Deserialize;
use zerosum::ratlp::{rat, Rational};

use crate::error::CliError;

/// Parses "num/den" or a plain integer string into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let numer: BigInt = num.parse().map_err(|_| malformed(text))?;
    let denom: BigInt = den.parse().map_err(|_| malformed(text))?;
    if denom.is_zero() {
        return Err(malformed(text));
    }
    Ok(Rational::new(numer, denom))
}

fn malformed(text: &str) -> CliError {
    CliError::Input(format!(
        "malformed rational {text:?}; expected \"num/den\" or an integer"
    ))
}

/// Canonical "num/den" form; the denominator is always positive.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A rational as it appears in spec and report files: an integer or a
/// "num/den" string.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RawRational {
    Int(i64),
    Text(String),
}

pub fn to_rational(raw: &RawRational) -> Result<Rational, CliError> {
    match raw {
        RawRational::Int(i) => Ok(rat(*i)),
        RawRational::Text(s) => parse_rational(s),
    }
}

pub fn to_rationals(raw: &[RawRational]) -> Result<Vec<Rational>, CliError> {
    raw.iter().map(to_rational).collect()
}

pub fn to_matrix(raw: &[Vec<RawRational>]) -> Result<Vec<Vec<Rational>>, CliError> {
    raw.iter().map(|row| to_rationals(row)).collect()
}
