use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form, always `num/den`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `num/den`, plain integers and decimals such as `0.25` or `1e-6`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(|| Error::Parse(format!("not a rational: {s:?}")))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - fp.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut r = Rational::from_integer(n) * ten.pow(scale);
    if neg {
        r = -r;
    }
    Some(r)
}

pub fn pow_int(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        Pow::pow(r, e as u64)
    } else {
        Pow::pow(r.recip(), e.unsigned_abs())
    }
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn to_biguint(n: &BigInt) -> BigUint {
    n.magnitude().clone()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_str_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("1e-6").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse_rational("-2.5E1").unwrap(), int(-25));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn text_form_is_lowest_terms() {
        assert_eq!(format_rational(&rat(10, -4)), "-5/2");
        assert_eq!(format_rational(&int(3)), "3/1");
    }
}
