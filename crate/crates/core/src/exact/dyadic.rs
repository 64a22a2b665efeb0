use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;

/// Binary float `mant * 2^exp` with an unbounded mantissa. Kept normalized:
/// the mantissa is odd, or zero with `exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Dyadic { mant: mant >> tz, exp: exp + tz as i64 }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.mant.is_zero() {
            0
        } else if self.mant.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), pow2(self.exp.unsigned_abs()))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (&self.mant >> shift as u64).to_f64().unwrap_or(0.0);
        m * 2f64.powi((self.exp + shift).clamp(-2000, 2000) as i32)
    }

    /// Largest dyadic with roughly `prec + 1` significant bits that is `<= r`.
    pub fn floor_of(r: &Rational, prec: u32) -> Self {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let n = r.numer();
        let d = r.denom();
        let s = prec as i64 + 1 - (n.bits() as i64 - d.bits() as i64);
        let m = if s >= 0 {
            (n << s as u64).div_floor(d)
        } else {
            n.div_floor(&(d << s.unsigned_abs()))
        };
        Dyadic::new(m, -s)
    }

    /// `Some` only when `r` has a power-of-two denominator.
    pub fn from_rational_exact(r: &Rational) -> Option<Self> {
        let d = r.denom();
        let k = d.bits() - 1;
        if *d != pow2(k) {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), -(k as i64)))
    }

    pub fn ceil_of(r: &Rational, prec: u32) -> Self {
        Dyadic::floor_of(&-r, prec).neg()
    }

    pub fn round_down(&self, prec: u32) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        Dyadic::new(self.mant.div_floor(&pow2(shift)), self.exp + shift as i64)
    }

    pub fn round_up(&self, prec: u32) -> Self {
        self.neg().round_down(prec).neg()
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn normalization_strips_trailing_zeros() {
        let d = Dyadic::new(BigInt::from(12), 0);
        assert_eq!(d.mantissa(), &BigInt::from(3));
        assert_eq!(d.exponent(), 2);
        assert_eq!(d.to_rational(), rat(12, 1));
    }

    #[test]
    fn exact_dyadic_rationals_survive_rounding() {
        let r = rat(-5, 32);
        assert_eq!(Dyadic::floor_of(&r, 64).to_rational(), r);
        assert_eq!(Dyadic::ceil_of(&r, 64).to_rational(), r);
    }

    #[test]
    fn thirds_are_bracketed() {
        let r = rat(1, 3);
        let lo = Dyadic::floor_of(&r, 20).to_rational();
        let hi = Dyadic::ceil_of(&r, 20).to_rational();
        assert!(lo < r && r < hi);
        assert!(&hi - &lo <= rat(1, 1 << 20));
    }

    proptest! {
        #[test]
        fn floor_ceil_bracket(n in -100_000i64..100_000, d in 1i64..100_000, prec in 8u32..80) {
            let r = rat(n, d);
            let lo = Dyadic::floor_of(&r, prec);
            let hi = Dyadic::ceil_of(&r, prec);
            prop_assert!(lo.to_rational() <= r);
            prop_assert!(hi.to_rational() >= r);
            prop_assert!(lo <= hi);
        }

        #[test]
        fn ordering_matches_rationals(a in -1000i64..1000, b in -1000i64..1000, e in -20i64..20, f in -20i64..20) {
            let x = Dyadic::new(BigInt::from(a), e);
            let y = Dyadic::new(BigInt::from(b), f);
            prop_assert_eq!(x.cmp(&y), x.to_rational().cmp(&y.to_rational()));
            prop_assert_eq!(x.add(&y).to_rational(), x.to_rational() + y.to_rational());
            prop_assert_eq!(x.mul(&y).to_rational(), x.to_rational() * y.to_rational());
        }

        #[test]
        fn rounding_is_directed(a in -1_000_000_000i64..1_000_000_000, e in -40i64..40, prec in 2u32..20) {
            let x = Dyadic::new(BigInt::from(a), e);
            prop_assert!(x.round_down(prec) <= x);
            prop_assert!(x.round_up(prec) >= x);
        }
    }
}
