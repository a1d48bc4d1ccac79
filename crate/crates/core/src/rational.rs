//! Exact rational numbers and their `"num/den"` wire encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{OgjError, Result};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"0.25"` exactly.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || OgjError::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(OgjError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, fractional)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), fractional);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fractional.len());
        let q = Rational::new(n, d);
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical `"num/den"` encoding (the denominator is always written, even when it is 1).
pub fn render(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

/// `q^k` for a nonnegative integer exponent.
pub fn pow(q: &Rational, k: u32) -> Rational {
    num_traits::pow(q.clone(), k as usize)
}

/// Serde adapter for a single rational as a `"num/den"` string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::render(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse("1/12").unwrap(), frac(1, 12));
        assert_eq!(parse("6/8").unwrap(), frac(3, 4));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse("-1.5").unwrap(), frac(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn render_is_canonical() {
        assert_eq!(render(&frac(2, 4)), "1/2");
        assert_eq!(render(&int(3)), "3/1");
        assert_eq!(render(&frac(1, -3)), "-1/3");
    }
}
