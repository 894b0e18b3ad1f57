//! Exact rational carrier used for prices, bang-per-buck ratios and
//! price-rise factors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn uint(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Renders as `numerator/denominator`, always with an explicit denominator.
pub fn to_fraction_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {text:?}: {reason}")]
pub struct RationalParseError {
    pub text: String,
    pub reason: &'static str,
}

/// Parses `p/q` or a bare integer `p`. The denominator must be positive.
pub fn parse_fraction(text: &str) -> Result<Rational, RationalParseError> {
    let err = |reason| RationalParseError {
        text: text.to_string(),
        reason,
    };
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p, q),
        None => (text, "1"),
    };
    let numer: BigInt = numer.trim().parse().map_err(|_| err("bad numerator"))?;
    let denom: BigInt = denom.trim().parse().map_err(|_| err("bad denominator"))?;
    if !denom.is_positive() {
        return Err(err("denominator must be positive"));
    }
    Ok(Rational::new(numer, denom))
}

/// Extended rational for factors that may be unbounded (e.g. no candidate
/// pair exists for a price-rise trigger).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    Finite(Rational),
    Infinite,
}

impl Factor {
    pub fn min(self, other: Factor) -> Factor {
        std::cmp::min(self, other)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Factor::Finite(r) => Some(r),
            Factor::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Factor::Infinite)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Finite(r) => f.write_str(&to_fraction_string(r)),
            Factor::Infinite => f.write_str("inf"),
        }
    }
}

pub fn is_zero(value: &Rational) -> bool {
    value.is_zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Serde adapter for `Rational` as a `"p/q"` string.
pub mod serde_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of `"p/q"` strings.
pub mod serde_fraction_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&to_fraction_string(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_fraction(t).map_err(serde::de::Error::custom))
            .collect()
    }
}
