use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::interval::{CertInterval, Sign, MIN_PRECISION};
use super::rational::Rational;
use super::scalar::{Radical, ScalarExpr};

/// Finite sum of monomials with identical radicals merged. The empty sum is
/// the only representation of a structural zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalSum {
    terms: BTreeMap<Radical, Rational>,
}

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum::default()
    }

    pub fn from_scalar(x: &ScalarExpr) -> Self {
        let mut s = FormalSum::zero();
        s.add_scalar(x);
        s
    }

    pub fn from_rational(r: Rational) -> Self {
        FormalSum::from_scalar(&ScalarExpr::from_rational(r))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> Vec<ScalarExpr> {
        self.terms
            .iter()
            .map(|(r, c)| ScalarExpr::from_coeff_radical(c.clone(), r.clone()))
            .collect()
    }

    pub fn add_scalar(&mut self, x: &ScalarExpr) {
        if x.is_zero() {
            return;
        }
        let key = x.radical().clone();
        let c = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *c += x.coefficient();
        if c.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.add_scalar(&ScalarExpr::from_coeff_radical(c.clone(), r.clone()));
        }
        out
    }

    pub fn sub(&self, other: &FormalSum) -> FormalSum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormalSum {
        FormalSum { terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect() }
    }

    pub fn scale(&self, w: &ScalarExpr) -> FormalSum {
        let mut out = FormalSum::zero();
        if w.is_zero() {
            return out;
        }
        for t in self.terms() {
            out.add_scalar(&t.mul(w));
        }
        out
    }

    pub fn mul(&self, other: &FormalSum) -> FormalSum {
        let mut out = FormalSum::zero();
        for a in self.terms() {
            for b in other.terms() {
                out.add_scalar(&a.mul(&b));
            }
        }
        out
    }

    /// The single term, or zero for the empty sum; `None` for two or more terms.
    pub fn as_monomial(&self) -> Option<ScalarExpr> {
        match self.terms.len() {
            0 => Some(ScalarExpr::zero()),
            1 => self.terms().pop(),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Radical::one()).cloned(),
            _ => None,
        }
    }

    pub fn enclose(&self, precision: u32) -> CertInterval {
        eval_sum(self, precision)
    }
}

/// Sign of a sum, escalating precision up to 8x before giving up.
pub fn certified_sign(s: &FormalSum, precision: u32) -> Sign {
    if let Some(m) = s.as_monomial() {
        return match m.sign() {
            0 => Sign::ContainsZero,
            x if x > 0 => Sign::Positive,
            _ => Sign::Negative,
        };
    }
    let mut prec = precision.max(MIN_PRECISION);
    loop {
        let sign = eval_sum(s, prec).sign();
        if sign != Sign::ContainsZero || prec >= precision.max(MIN_PRECISION) * 8 {
            return sign;
        }
        prec *= 2;
    }
}

pub fn eval_sum(s: &FormalSum, precision: u32) -> CertInterval {
    let mut acc = CertInterval::zero(precision);
    if s.is_zero() {
        return acc;
    }
    if let Some(r) = s.as_rational() {
        return CertInterval::from_rational(&r, precision);
    }
    let guard = precision + 8 + s.len().ilog2();
    for t in s.terms() {
        acc = acc.add(&t.enclose(guard));
    }
    acc.with_precision(precision)
}

impl Serialize for FormalSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<ScalarExpr>::deserialize(d)?;
        let mut out = FormalSum::zero();
        for t in &terms {
            out.add_scalar(t);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn empty_sum_is_zero_interval() {
        let i = eval_sum(&FormalSum::zero(), 64);
        assert!(i.is_zero() && i.is_degenerate());
    }

    #[test]
    fn rational_monomial() {
        let i = eval_sum(&FormalSum::from_rational(int(2)), 64);
        assert_eq!((i.lo_rational(), i.hi_rational()), (int(2), int(2)));
    }

    #[test]
    fn identical_monomials_cancel() {
        let x = ScalarExpr::power(&rat(2, 3), &rat(1, 2)).unwrap();
        let mut s = FormalSum::from_scalar(&x);
        s.add_scalar(&x.neg());
        assert!(s.is_zero());
        let i = eval_sum(&s, 256);
        assert!(i.is_zero());
    }

    #[test]
    fn distinct_radicals_stay_apart() {
        let a = ScalarExpr::power(&int(2), &rat(1, 2)).unwrap();
        let b = ScalarExpr::power(&int(3), &rat(1, 2)).unwrap();
        let s = FormalSum::from_scalar(&a).add(&FormalSum::from_scalar(&b));
        assert_eq!(s.len(), 2);
        assert!(s.as_monomial().is_none());
        let i = s.enclose(128);
        // sqrt2 + sqrt3 = 3.1462643699...
        let lo = rat(31462643699, 10_000_000_000);
        let hi = rat(31462643700, 10_000_000_000);
        assert!(i.lo_rational() > lo && i.hi_rational() < hi);
    }

    proptest! {
        #[test]
        fn sum_enclosure_contains_rational_value(v in prop::collection::vec((-20i64..20, 1i64..20), 0..8)) {
            let mut s = FormalSum::zero();
            let mut exact = Rational::zero();
            for (n, d) in v {
                s.add_scalar(&ScalarExpr::from_rational(rat(n, d)));
                exact += rat(n, d);
            }
            prop_assert!(eval_sum(&s, 64).contains(&exact));
            prop_assert_eq!(s.is_zero(), exact.is_zero());
        }

        #[test]
        fn negation_cancels(a in 1i64..40, b in 1i64..7) {
            let x = ScalarExpr::power(&rat(a, a + 1), &rat(1, b + 1)).unwrap();
            let s = FormalSum::from_scalar(&x);
            prop_assert!(s.add(&s.neg()).is_zero());
        }
    }
}
