use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::rational::{format_rational, parse_rational, pow_int, Rational};
use crate::error::{Error, Result};

pub const MIN_PRECISION: u32 = 8;
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    ContainsZero,
}

/// Closed interval with dyadic endpoints. Every operation rounds the
/// endpoints outward to `precision` significant bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision: u32,
}

impl CertInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        CertInterval { lo: lo.round_down(precision), hi: hi.round_up(precision), precision }
    }

    pub fn point(d: Dyadic, precision: u32) -> Self {
        CertInterval::new(d.clone(), d, precision)
    }

    pub fn zero(precision: u32) -> Self {
        CertInterval::point(Dyadic::zero(), precision)
    }

    pub fn from_int(n: i64, precision: u32) -> Self {
        CertInterval::point(Dyadic::from_int(n), precision)
    }

    pub fn from_rational(r: &Rational, precision: u32) -> Self {
        CertInterval {
            lo: Dyadic::floor_of(r, precision),
            hi: Dyadic::ceil_of(r, precision),
            precision,
        }
    }

    pub fn from_rationals(lo: &Rational, hi: &Rational, precision: u32) -> Self {
        CertInterval::new(Dyadic::floor_of(lo, precision), Dyadic::ceil_of(hi, precision), precision)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational()
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        CertInterval::new(self.lo.clone(), self.hi.clone(), precision)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo_rational() <= *r && *r <= self.hi_rational()
    }

    pub fn contains_interval(&self, other: &CertInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> Rational {
        self.hi_rational() - self.lo_rational()
    }

    pub fn sign(&self) -> Sign {
        sign_certify(self)
    }

    fn prec_with(&self, other: &CertInterval) -> u32 {
        self.precision.max(other.precision)
    }

    pub fn add(&self, other: &CertInterval) -> Self {
        CertInterval::new(self.lo.add(&other.lo), self.hi.add(&other.hi), self.prec_with(other))
    }

    pub fn sub(&self, other: &CertInterval) -> Self {
        CertInterval::new(self.lo.sub(&other.hi), self.hi.sub(&other.lo), self.prec_with(other))
    }

    pub fn neg(&self) -> Self {
        CertInterval { lo: self.hi.neg(), hi: self.lo.neg(), precision: self.precision }
    }

    pub fn mul(&self, other: &CertInterval) -> Self {
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = c.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        CertInterval::new(lo, hi, self.prec_with(other))
    }

    pub fn scale_pow2(&self, k: i64) -> Self {
        CertInterval { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k), precision: self.precision }
    }

    /// `None` when the divisor is not certified nonzero.
    pub fn div(&self, other: &CertInterval) -> Option<Self> {
        if other.sign() == Sign::ContainsZero {
            return None;
        }
        let prec = self.prec_with(other);
        let (a, b) = (self.lo_rational(), self.hi_rational());
        let (c, d) = (other.lo_rational(), other.hi_rational());
        let q = [&a / &c, &a / &d, &b / &c, &b / &d];
        let lo = q.iter().min().cloned().unwrap_or_default();
        let hi = q.iter().max().cloned().unwrap_or_default();
        Some(CertInterval::from_rationals(&lo, &hi, prec))
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Sign::Positive => self.clone(),
            Sign::Negative => self.neg(),
            Sign::ContainsZero => {
                let m = if self.lo.abs() > self.hi.abs() { self.lo.abs() } else { self.hi.abs() };
                CertInterval { lo: Dyadic::zero(), hi: m, precision: self.precision }
            }
        }
    }

    pub fn max(&self, other: &CertInterval) -> Self {
        CertInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            precision: self.prec_with(other),
        }
    }

    pub fn hull(&self, other: &CertInterval) -> Self {
        CertInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            precision: self.prec_with(other),
        }
    }

    /// Raises a nonnegative interval to a rational power, endpoint by endpoint.
    pub fn pow_rational(&self, e: &Rational) -> Result<Self> {
        if self.lo.signum() < 0 {
            return Err(Error::InvalidInput("rational power of an interval reaching below zero".into()));
        }
        if e.is_zero() {
            return Ok(CertInterval::from_int(1, self.precision));
        }
        let prec = self.precision;
        let end = |d: &Dyadic| -> Result<CertInterval> {
            if d.is_zero() {
                if e.is_negative() {
                    return Err(Error::InvalidInput("negative power of zero".into()));
                }
                return Ok(CertInterval::zero(prec));
            }
            pow_enclose(&d.to_rational(), e, prec + 4)
        };
        let a = end(&self.lo)?;
        let b = end(&self.hi)?;
        let (lo, hi) = if e.is_positive() { (a.lo, b.hi) } else { (b.lo, a.hi) };
        Ok(CertInterval::new(lo, hi, prec))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for CertInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalWire {
    lo: String,
    hi: String,
    precision: u32,
}

impl Serialize for CertInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalWire {
            lo: format_rational(&self.lo_rational()),
            hi: format_rational(&self.hi_rational()),
            precision: self.precision,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertInterval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = IntervalWire::deserialize(d)?;
        let lo = parse_rational(&w.lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&w.hi).map_err(D::Error::custom)?;
        let (Some(dl), Some(dh)) = (Dyadic::from_rational_exact(&lo), Dyadic::from_rational_exact(&hi)) else {
            return Err(D::Error::custom("interval endpoints must be dyadic"));
        };
        if lo > hi {
            return Err(D::Error::custom("interval endpoints out of order"));
        }
        Ok(CertInterval { lo: dl, hi: dh, precision: w.precision })
    }
}

pub fn sign_certify(i: &CertInterval) -> Sign {
    if i.lo.signum() > 0 {
        Sign::Positive
    } else if i.hi.signum() < 0 {
        Sign::Negative
    } else {
        Sign::ContainsZero
    }
}

/// Encloses `base^exponent`. The interval is degenerate exactly when the
/// power is a dyadic rational small enough to be hit by the root grid.
pub fn pow_enclose(base: &Rational, exponent: &Rational, precision: u32) -> Result<CertInterval> {
    if precision < MIN_PRECISION {
        return Err(Error::PrecisionTooLow { got: precision, min: MIN_PRECISION });
    }
    if !base.is_positive() {
        return Err(Error::NonPositiveBase);
    }
    let a = exponent.numer();
    let b = exponent.denom();
    let a_i64: i64 = a.try_into().map_err(|_| Error::InvalidInput("exponent numerator too large".into()))?;
    let r = pow_int(base, a_i64);
    if b.is_one() {
        return Ok(CertInterval::from_rational(&r, precision));
    }
    let b_u32: u32 = b.try_into().map_err(|_| Error::InvalidInput("exponent denominator too large".into()))?;
    let n = r.numer();
    let d = r.denom();
    let log_floor = (n.bits() as i64 - 1 - d.bits() as i64).div_euclid(b_u32 as i64);
    let s = precision as i64 + 2 - log_floor;
    let sb = s * b_u32 as i64;
    let (num, den) = if sb >= 0 {
        (n << sb as u64, d.clone())
    } else {
        (n.clone(), d << sb.unsigned_abs())
    };
    let m: BigInt = (&num / &den).nth_root(b_u32);
    let exact = m.pow(b_u32) * &den == num;
    let lo = Dyadic::new(m.clone(), -s);
    let hi = if exact { lo.clone() } else { Dyadic::new(m + 1, -s) };
    Ok(CertInterval { lo, hi, precision })
}
