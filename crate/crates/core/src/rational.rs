//! Exact rational numbers and their textual form.
//!
//! Everything in the crate is computed over [`Rational`]; nothing is ever
//! rounded. Decimal rendering exists only for display.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.75"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::parse(0, "empty rational"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("bad numerator in '{s}'")))?;
        let den_pos = s.find('/').unwrap_or(0) + 1;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::parse(den_pos, format!("bad denominator in '{s}'")))?;
        if den.is_zero() {
            return Err(Error::parse(den_pos, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::parse(0, format!("bad decimal '{s}'")));
        }
        let mut num: BigInt = digits.parse().map_err(|_| Error::parse(0, "bad decimal"))?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    let num: BigInt = s.parse().map_err(|_| Error::parse(0, format!("bad integer '{s}'")))?;
    Ok(Rational::from_integer(num))
}

/// Canonical exact rendering: `"p/q"`, or `"p"` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Approximate decimal rendering with `digits` fractional digits
/// (round half away from zero).
pub fn format_decimal(x: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x.abs() * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * BigInt::from(2);
    let rounded = if twice >= *scaled.denom() { q + 1 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded_is_zero(&int_part, &frac_part) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

/// Lossy conversion used only for reporting.
pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter that writes rationals as their exact string form.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            let s: Option<String> = Option::deserialize(d)?;
            s.map(|v| parse_rational(&v).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let v: Vec<String> = Vec::deserialize(d)?;
            v.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("6/8").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("0.75").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
        assert_eq!(parse_rational("0/1").unwrap(), zero());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_exact_and_decimal() {
        assert_eq!(format_rational(&ratio(6, 8)), "3/4");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(format_decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(format_decimal(&ratio(2, 3), 2), "0.67");
        assert_eq!(format_decimal(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(format_decimal(&int(1), 3), "1.000");
    }
}
