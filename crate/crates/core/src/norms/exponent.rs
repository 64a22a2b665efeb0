use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PExponent {
    Finite(Rational),
    Infinity,
}

impl PExponent {
    pub fn finite(p: Rational) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::InvalidInput(format!("p must be positive, got {}", format_rational(&p))));
        }
        Ok(PExponent::Finite(p))
    }

    pub fn one() -> Self {
        PExponent::Finite(Rational::one())
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            PExponent::Finite(p) => Some(p),
            PExponent::Infinity => None,
        }
    }

    /// True for the quasi-norm range p in (0, 1).
    pub fn is_quasi(&self) -> bool {
        matches!(self, PExponent::Finite(p) if *p < Rational::one())
    }

    pub fn q(&self) -> QExponent {
        match self {
            PExponent::Finite(p) if *p < Rational::one() => QExponent { q: p.clone() },
            _ => QExponent { q: Rational::one() },
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "Inf" => Ok(PExponent::Infinity),
            t => PExponent::finite(parse_rational(t)?),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{}", format_rational(p)),
            PExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The exponent q with ‖tx‖ = |t|^q ‖x‖: q = p below 1, else 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QExponent {
    #[serde(with = "crate::exact::rational::serde_str")]
    pub q: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    #[test]
    fn parse_and_q() {
        let p: PExponent = "1/2".parse().unwrap();
        assert_eq!(p.q().q, rat(1, 2));
        assert!(p.is_quasi());
        let p: PExponent = "2".parse().unwrap();
        assert_eq!(p.q().q, rat(1, 1));
        assert_eq!("inf".parse::<PExponent>().unwrap(), PExponent::Infinity);
        assert_eq!(PExponent::Infinity.q().q, rat(1, 1));
        assert!("0".parse::<PExponent>().is_err());
        assert!("-1".parse::<PExponent>().is_err());
    }
}
