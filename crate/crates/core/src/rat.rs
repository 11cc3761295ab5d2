//! Rational helpers: parsing, formatting and conversions shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.28"` or `"1e-3"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("empty number {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

pub fn fmt_q(r: &Q) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Q) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<Q> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Smallest integer ≥ r.
pub fn ceil_q(r: &Q) -> BigInt {
    r.ceil().to_integer()
}

pub fn pow_q(base: &Q, e: u32) -> Q {
    num_traits::pow(base.clone(), e as usize)
}

pub fn abs_q(r: &Q) -> Q {
    r.abs()
}

/// A number as it appears in JSON inputs: exact string or plain float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumRepr {
    Text(String),
    Int(i64),
    Float(f64),
}

impl NumRepr {
    pub fn exact(r: &Q) -> Self {
        NumRepr::Text(fmt_q(r))
    }

    /// Returns the value and whether it was written exactly (string or integer).
    pub fn value(&self) -> Result<(Q, bool)> {
        match self {
            NumRepr::Text(s) => Ok((parse_q(s)?, true)),
            NumRepr::Int(i) => Ok((qi(*i), true)),
            NumRepr::Float(x) => Ok((from_f64(*x)?, false)),
        }
    }
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod as_text {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = NumRepr::deserialize(d)?;
        v.value().map(|(r, _)| r).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_q("55/216").unwrap(), q(55, 216));
        assert_eq!(parse_q("0.28").unwrap(), q(7, 25));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_q("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_q("12").unwrap(), qi(12));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn text_round_trip() {
        let r = q(-3089, 46656);
        assert_eq!(parse_q(&fmt_q(&r)).unwrap(), r);
    }
}
