use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factor::factor;
use super::interval::{pow_enclose, CertInterval};
use super::rational::{floor_int, format_rational, parse_rational, pow_int, Rational};
use crate::error::{Error, Result};

/// Product of prime-atom powers with exponents strictly inside (0, 1),
/// sorted by atom. The empty radical is 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radical(Vec<(BigUint, Rational)>);

impl Radical {
    pub fn one() -> Self {
        Radical(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(BigUint, Rational)] {
        &self.0
    }

    /// Product of two radicals, returned as (integer carry, radical).
    fn mul(&self, other: &Radical) -> (BigUint, Radical) {
        let mut carry = BigUint::one();
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = j >= other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0);
            let take_right = i >= self.0.len() || (j < other.0.len() && other.0[j].0 < self.0[i].0);
            if take_left {
                out.push(self.0[i].clone());
                i += 1;
            } else if take_right {
                out.push(other.0[j].clone());
                j += 1;
            } else {
                let atom = self.0[i].0.clone();
                let mut e = &self.0[i].1 + &other.0[j].1;
                if e >= Rational::one() {
                    carry *= &atom;
                    e -= Rational::one();
                }
                if !e.is_zero() {
                    out.push((atom, e));
                }
                i += 1;
                j += 1;
            }
        }
        (carry, Radical(out))
    }

    pub fn enclose(&self, precision: u32) -> CertInterval {
        let mut acc = CertInterval::from_int(1, precision);
        for (atom, e) in &self.0 {
            let base = Rational::from_integer(BigInt::from(atom.clone()));
            let f = pow_enclose(&base, e, precision).expect("radical atoms are positive");
            acc = acc.mul(&f);
        }
        acc
    }
}

/// Signed monomial `coeff * radical`, held in canonical form: every atom is
/// split into an integer power folded into `coeff` and a fractional power in
/// `radical`. Two values are equal iff their canonical forms agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    coeff: Rational,
    radical: Radical,
}

fn accumulate(map: &mut BTreeMap<BigUint, Rational>, n: &BigUint, weight: &Rational) {
    for (atom, mult) in factor(n) {
        let add = weight * Rational::from_integer(BigInt::from(mult));
        let slot = map.entry(atom).or_insert_with(Rational::zero);
        *slot += add;
    }
}

fn assemble(mut coeff: Rational, exps: BTreeMap<BigUint, Rational>) -> ScalarExpr {
    let mut rad = Vec::new();
    for (atom, e) in exps {
        if e.is_zero() {
            continue;
        }
        let fl = floor_int(&e);
        let frac = &e - Rational::from_integer(fl.clone());
        let atom_r = Rational::from_integer(BigInt::from(atom.clone()));
        let fl: i64 = (&fl).try_into().expect("exponent within i64");
        coeff *= pow_int(&atom_r, fl);
        if !frac.is_zero() {
            rad.push((atom, frac));
        }
    }
    ScalarExpr::from_parts(coeff, Radical(rad))
}

impl ScalarExpr {
    fn from_parts(coeff: Rational, radical: Radical) -> Self {
        if coeff.is_zero() {
            ScalarExpr { coeff, radical: Radical::one() }
        } else {
            ScalarExpr { coeff, radical }
        }
    }

    pub(crate) fn from_coeff_radical(coeff: Rational, radical: Radical) -> Self {
        ScalarExpr::from_parts(coeff, radical)
    }

    pub fn zero() -> Self {
        ScalarExpr { coeff: Rational::zero(), radical: Radical::one() }
    }

    pub fn one() -> Self {
        ScalarExpr::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        ScalarExpr { coeff: r, radical: Radical::one() }
    }

    pub fn from_int(n: i64) -> Self {
        ScalarExpr::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `sign * prod base_i^exp_i`, canonicalized.
    pub fn from_factors(sign: i32, factors: &[(Rational, Rational)]) -> Result<Self> {
        if sign == 0 {
            if !factors.is_empty() {
                return Err(Error::InvalidInput("zero sign with nonempty factors".into()));
            }
            return Ok(ScalarExpr::zero());
        }
        let mut coeff = Rational::from_integer(BigInt::from(sign.signum()));
        let mut exps = BTreeMap::new();
        for (base, e) in factors {
            if !base.is_positive() {
                return Err(Error::NonPositiveBase);
            }
            if e.denom().is_one() {
                let k: i64 = e.numer().try_into().map_err(|_| Error::InvalidInput("exponent too large".into()))?;
                coeff *= pow_int(base, k);
            } else {
                accumulate(&mut exps, base.numer().magnitude(), e);
                accumulate(&mut exps, base.denom().magnitude(), &-e);
            }
        }
        Ok(assemble(coeff, exps))
    }

    /// `base^exp` for a positive rational base.
    pub fn power(base: &Rational, exp: &Rational) -> Result<Self> {
        ScalarExpr::from_factors(1, &[(base.clone(), exp.clone())])
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coeff
    }

    pub fn radical(&self) -> &Radical {
        &self.radical
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn sign(&self) -> i32 {
        if self.coeff.is_zero() {
            0
        } else if self.coeff.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.radical.is_one().then_some(&self.coeff)
    }

    /// Factor multiset view: `|coeff|` with exponent 1 (omitted when 1)
    /// followed by the radical atoms.
    pub fn factors(&self) -> Vec<(Rational, Rational)> {
        let mut out = Vec::new();
        let c = self.coeff.abs();
        if !c.is_zero() && !c.is_one() {
            out.push((c, Rational::one()));
        }
        for (a, e) in &self.radical.0 {
            out.push((Rational::from_integer(BigInt::from(a.clone())), e.clone()));
        }
        out
    }

    pub fn neg(&self) -> Self {
        ScalarExpr { coeff: -&self.coeff, radical: self.radical.clone() }
    }

    pub fn abs(&self) -> Self {
        ScalarExpr { coeff: self.coeff.abs(), radical: self.radical.clone() }
    }

    pub fn mul(&self, other: &ScalarExpr) -> Self {
        if self.is_zero() || other.is_zero() {
            return ScalarExpr::zero();
        }
        let (carry, radical) = self.radical.mul(&other.radical);
        let coeff = &self.coeff * &other.coeff * Rational::from_integer(BigInt::from(carry));
        ScalarExpr::from_parts(coeff, radical)
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        ScalarExpr::from_parts(&self.coeff * r, self.radical.clone())
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        if self.is_zero() {
            return if n > 0 {
                Ok(ScalarExpr::zero())
            } else if n == 0 {
                Ok(ScalarExpr::one())
            } else {
                Err(Error::InvalidInput("negative power of zero".into()))
            };
        }
        let mut coeff = pow_int(&self.coeff, n);
        let mut rad = Vec::with_capacity(self.radical.0.len());
        let nr = Rational::from_integer(BigInt::from(n));
        for (atom, e) in &self.radical.0 {
            let t = e * &nr;
            let fl = floor_int(&t);
            let frac = &t - Rational::from_integer(fl.clone());
            let fl: i64 = (&fl).try_into().expect("exponent within i64");
            coeff *= pow_int(&Rational::from_integer(BigInt::from(atom.clone())), fl);
            if !frac.is_zero() {
                rad.push((atom.clone(), frac));
            }
        }
        Ok(ScalarExpr::from_parts(coeff, Radical(rad)))
    }

    pub fn inv(&self) -> Result<Self> {
        self.powi(-1)
    }

    pub fn div(&self, other: &ScalarExpr) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Real power; defined for positive values, or any value with an
    /// integer exponent.
    pub fn pow(&self, e: &Rational) -> Result<Self> {
        if e.denom().is_one() {
            let k: i64 = e.numer().try_into().map_err(|_| Error::InvalidInput("exponent too large".into()))?;
            return self.powi(k);
        }
        match self.sign() {
            0 if e.is_positive() => return Ok(ScalarExpr::zero()),
            1 => {}
            _ => return Err(Error::InvalidInput("fractional power of a non-positive value".into())),
        }
        let mut exps = BTreeMap::new();
        accumulate(&mut exps, self.coeff.numer().magnitude(), e);
        accumulate(&mut exps, self.coeff.denom().magnitude(), &-e);
        for (atom, f) in &self.radical.0 {
            let slot = exps.entry(atom.clone()).or_insert_with(Rational::zero);
            *slot += f * e;
        }
        Ok(assemble(Rational::one(), exps))
    }

    pub fn enclose(&self, precision: u32) -> CertInterval {
        if self.radical.is_one() {
            return CertInterval::from_rational(&self.coeff, precision);
        }
        let guard = precision + 16;
        let c = CertInterval::from_rational(&self.coeff, guard);
        c.mul(&self.radical.enclose(guard)).with_precision(precision)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.denom().is_one() {
            write!(f, "{}", self.coeff.numer())?;
        } else {
            write!(f, "{}", self.coeff)?;
        }
        for (a, e) in &self.radical.0 {
            write!(f, "*{}^({})", a, e)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FactorWire {
    pub base: String,
    pub exp: String,
}

#[derive(Serialize, Deserialize)]
struct ScalarWire {
    sign: i32,
    factors: Vec<FactorWire>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarInput {
    Full(ScalarWire),
    Bare(Vec<FactorWire>),
    Text(String),
}

impl ScalarExpr {
    pub(crate) fn from_wire_factors(sign: i32, factors: &[FactorWire]) -> Result<Self> {
        let mut parsed = Vec::with_capacity(factors.len());
        for f in factors {
            let base = parse_rational(&f.base)?;
            let exp = parse_rational(&f.exp)?;
            if exp.is_zero() {
                return Err(Error::Parse("factor exponents must be nonzero".into()));
            }
            if parsed.iter().any(|(b, _): &(BigRational, BigRational)| *b == base) {
                return Err(Error::Parse(format!("repeated factor base {}", f.base)));
            }
            parsed.push((base, exp));
        }
        ScalarExpr::from_factors(sign, &parsed)
    }
}

impl Serialize for ScalarExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarWire {
            sign: self.sign(),
            factors: self
                .factors()
                .into_iter()
                .map(|(b, e)| FactorWire { base: format_rational(&b), exp: format_rational(&e) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ScalarInput::deserialize(d)? {
            ScalarInput::Full(w) => ScalarExpr::from_wire_factors(w.sign, &w.factors).map_err(D::Error::custom),
            ScalarInput::Bare(f) => ScalarExpr::from_wire_factors(1, &f).map_err(D::Error::custom),
            ScalarInput::Text(t) => parse_rational(&t).map(ScalarExpr::from_rational).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn canonical_form_merges_atoms() {
        // (2/3)^(1/2) * 6^(1/2) = 2
        let a = ScalarExpr::power(&rat(2, 3), &rat(1, 2)).unwrap();
        let b = ScalarExpr::power(&int(6), &rat(1, 2)).unwrap();
        assert_eq!(a.mul(&b), ScalarExpr::from_int(2));
        // 8^(1/2) = 2 * 2^(1/2)
        let c = ScalarExpr::power(&int(8), &rat(1, 2)).unwrap();
        assert_eq!(c.coefficient(), &int(2));
        assert_eq!(c.radical().factors().len(), 1);
    }

    #[test]
    fn multiplication_adds_exponents() {
        let a = ScalarExpr::from_factors(1, &[(int(2), rat(1, 3)), (int(3), rat(1, 5))]).unwrap();
        let b = ScalarExpr::power(&int(2), &rat(1, 4)).unwrap();
        let p = a.mul(&b);
        let f = p.radical().factors();
        assert_eq!(f[0], (BigUint::from(2u32), rat(7, 12)));
        assert_eq!(f[1], (BigUint::from(3u32), rat(1, 5)));
        assert!(p.coefficient().is_one());
    }

    #[test]
    fn pth_powers_become_rational() {
        // |a^(1/p) n^(-k/p)|^p = a n^-k for a = 6/7, n = 7, k = 3, p = 1/2
        let p = rat(1, 2);
        let x = ScalarExpr::power(&rat(6, 7), &p.recip())
            .unwrap()
            .mul(&ScalarExpr::power(&int(7), &(-int(3) / &p)).unwrap());
        let y = x.pow(&p).unwrap();
        assert_eq!(y.as_rational(), Some(&(rat(6, 7) * pow_int(&int(7), -3))));
    }

    #[test]
    fn json_round_trip_and_forms() {
        let x = ScalarExpr::from_factors(-1, &[(rat(2, 3), rat(1, 2)), (int(5), rat(-1, 3))]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let y: ScalarExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert_eq!(serde_json::to_string(&y).unwrap(), s);
        let bare: ScalarExpr = serde_json::from_str(r#"[{"base":"2/3","exp":"1/2"}]"#).unwrap();
        assert_eq!(bare, ScalarExpr::power(&rat(2, 3), &rat(1, 2)).unwrap());
        let text: ScalarExpr = serde_json::from_str(r#""-3/4""#).unwrap();
        assert_eq!(text, ScalarExpr::from_rational(rat(-3, 4)));
        assert!(serde_json::from_str::<ScalarExpr>(r#"[{"base":"2","exp":"0"}]"#).is_err());
        assert!(serde_json::from_str::<ScalarExpr>(r#"[{"base":"2","exp":"1/2"},{"base":"2","exp":"1/3"}]"#).is_err());
        assert!(serde_json::from_str::<ScalarExpr>(r#"[{"base":"-2","exp":"1/2"}]"#).is_err());
    }

    #[test]
    fn enclosure_of_radical() {
        let x = ScalarExpr::power(&rat(2, 3), &rat(1, 2)).unwrap();
        let i = x.enclose(128);
        let lo = i.lo_rational();
        let hi = i.hi_rational();
        assert!(&lo * &lo <= rat(2, 3) && &hi * &hi >= rat(2, 3));
    }

    fn small_scalar() -> impl Strategy<Value = ScalarExpr> {
        (
            prop_oneof![Just(-1), Just(1)],
            prop::collection::vec((1i64..30, 1i64..30, -5i64..6, 1i64..5), 0..3),
        )
            .prop_map(|(sign, fs)| {
                let mut parts: Vec<(Rational, Rational)> = Vec::new();
                for (n, d, a, b) in fs {
                    let base = rat(n, d);
                    if a == 0 || parts.iter().any(|(x, _)| *x == base) {
                        continue;
                    }
                    parts.push((base, rat(a, b)));
                }
                ScalarExpr::from_factors(sign, &parts).unwrap()
            })
    }

    proptest! {
        #[test]
        fn product_enclosure_contains_product_of_values(a in small_scalar(), b in small_scalar()) {
            let prod = a.mul(&b).enclose(96);
            let direct = a.enclose(120).mul(&b.enclose(120));
            // both enclose the same real number, so they must intersect
            prop_assert!(prod.lo() <= direct.hi() && direct.lo() <= prod.hi());
        }

        #[test]
        fn inverse_is_exact(a in small_scalar()) {
            prop_assert_eq!(a.mul(&a.inv().unwrap()), ScalarExpr::one());
        }

        #[test]
        fn integer_powers_agree_with_repeated_products(a in small_scalar(), n in 0i64..5) {
            let mut acc = ScalarExpr::one();
            for _ in 0..n {
                acc = acc.mul(&a);
            }
            prop_assert_eq!(a.powi(n).unwrap(), acc);
        }
    }
}
