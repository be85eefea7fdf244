//! Exact rational scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator at all times, so structural equality is value equality.
//! The textual form is `p/q`, or `p` when `q = 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parse `"p/q"` or `"p"` (optional leading sign, surrounding whitespace ignored).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::invalid(format!("not a rational number: {text:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::invalid(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact value of an `f64` when it is an integer of moderate size.
pub fn integral_f64(value: f64) -> Option<i64> {
    if value.is_finite() && value.fract() == 0.0 && value.abs() < 1e15 {
        Some(value as i64)
    } else {
        None
    }
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Parse a JSON value holding a rational: a `"p/q"` string or a JSON integer.
pub fn rational_from_json(value: &serde_json::Value) -> Result<Rational> {
    match value {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else {
                Err(Error::invalid(format!(
                    "expected an integer or a \"p/q\" string, found {n}"
                )))
            }
        }
        other => Err(Error::invalid(format!(
            "expected a rational, found {other}"
        ))),
    }
}

/// Serde adapter: `Rational` <-> `"p/q"` string.
pub mod serde_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_on_construction() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert_eq!(parse_rational("4/8").unwrap(), rat(1, 2));
        assert_eq!(format_rational(&rat(11, 16)), "11/16");
        assert_eq!(format_rational(&int(2)), "2");
        assert_eq!(format_rational(&rat(-1, 6)), "-1/6");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn json_forms() {
        assert_eq!(rational_from_json(&serde_json::json!("3/4")).unwrap(), rat(3, 4));
        assert_eq!(rational_from_json(&serde_json::json!(5)).unwrap(), int(5));
        assert!(rational_from_json(&serde_json::json!(0.5)).is_err());
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow(&rat(1, 2), 3), rat(1, 8));
        assert_eq!(pow(&int(7), 0), int(1));
        assert_eq!(integral_f64(2.0), Some(2));
        assert_eq!(integral_f64(2.5), None);
    }
}
