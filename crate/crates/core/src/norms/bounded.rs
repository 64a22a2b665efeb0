use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exponent::PExponent;
use super::pnorm::p_norm;
use crate::exact::{FormalSum, Rational};
use crate::seq::SeqExpr;

/// A bounded coefficient sequence t = (t_n), n >= 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundedSeq {
    /// t_n = values[(n - 1) mod len]
    Periodic {
        #[serde(with = "crate::exact::rational::serde_str_vec")]
        values: Vec<Rational>,
    },
    /// t_n = a/b with |a| <= num_bound and 1 <= b <= den_bound, drawn from
    /// stream n of a ChaCha8 generator keyed by `seed`.
    Seeded { seed: u64, num_bound: u64, den_bound: u64 },
    Sequence { seq: SeqExpr },
}

impl BoundedSeq {
    pub fn constant(c: Rational) -> Self {
        BoundedSeq::Periodic { values: vec![c] }
    }

    pub fn alternating() -> Self {
        BoundedSeq::Periodic {
            values: vec![Rational::from_integer(1.into()), Rational::from_integer((-1).into())],
        }
    }

    pub fn value(&self, n: u64) -> FormalSum {
        match self {
            BoundedSeq::Periodic { values } => {
                if values.is_empty() {
                    return FormalSum::zero();
                }
                let v = &values[((n - 1) % values.len() as u64) as usize];
                if v.is_zero() {
                    FormalSum::zero()
                } else {
                    FormalSum::from_rational(v.clone())
                }
            }
            BoundedSeq::Seeded { .. } => {
                let v = self.seeded_value(n).expect("seeded");
                if v.is_zero() {
                    FormalSum::zero()
                } else {
                    FormalSum::from_rational(v)
                }
            }
            BoundedSeq::Sequence { seq } => seq.coord(n),
        }
    }

    fn seeded_value(&self, n: u64) -> Option<Rational> {
        let BoundedSeq::Seeded { seed, num_bound, den_bound } = self else {
            return None;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        rng.set_stream(n);
        let b = *num_bound as i64;
        let num = rng.gen_range(-b..=b);
        let den = rng.gen_range(1..=(*den_bound).max(1) as i64);
        Some(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// A certified rational C with |t_n| <= C for all n.
    pub fn sup_bound(&self, precision: u32) -> Option<Rational> {
        match self {
            BoundedSeq::Periodic { values } => Some(values.iter().map(|v| v.abs()).max().unwrap_or_default()),
            BoundedSeq::Seeded { num_bound, .. } => Some(Rational::from_integer(BigInt::from(*num_bound))),
            BoundedSeq::Sequence { seq } => {
                let window = seq.support_end().unwrap_or(0).max(seq.support_start().min(64)).max(1);
                p_norm(seq, &PExponent::Infinity, window, precision).ok().map(|i| i.hi_rational())
            }
        }
    }

    /// True when t_n is structurally zero for every n >= from.
    pub fn vanishes_from(&self, from: u64) -> bool {
        match self {
            BoundedSeq::Periodic { values } => values.iter().all(|v| v.is_zero()),
            BoundedSeq::Seeded { num_bound, .. } => *num_bound == 0,
            BoundedSeq::Sequence { seq } => seq.support_end().is_some_and(|e| e < from),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use crate::exact::ScalarExpr;

    #[test]
    fn periodic_values() {
        let t = BoundedSeq::alternating();
        assert_eq!(t.value(1), FormalSum::from_rational(int(1)));
        assert_eq!(t.value(2), FormalSum::from_rational(int(-1)));
        assert_eq!(t.value(5), FormalSum::from_rational(int(1)));
        assert_eq!(t.sup_bound(64), Some(int(1)));
    }

    #[test]
    fn seeded_is_deterministic_and_bounded() {
        let t = BoundedSeq::Seeded { seed: 42, num_bound: 7, den_bound: 5 };
        let a: Vec<FormalSum> = (1..30).map(|n| t.value(n)).collect();
        let b: Vec<FormalSum> = (1..30).map(|n| t.value(n)).collect();
        assert_eq!(a, b);
        for v in a {
            assert!(v.as_rational().unwrap().abs() <= int(7));
        }
        let other = BoundedSeq::Seeded { seed: 43, num_bound: 7, den_bound: 5 };
        assert_ne!((1..30).map(|n| t.value(n)).collect::<Vec<_>>(), (1..30).map(|n| other.value(n)).collect::<Vec<_>>());
    }

    #[test]
    fn sequence_sup() {
        let s = SeqExpr::power_tail(ScalarExpr::from_rational(rat(3, 2)), ScalarExpr::from_rational(rat(1, 2)), 4).unwrap();
        let t = BoundedSeq::Sequence { seq: s };
        assert_eq!(t.sup_bound(64), Some(rat(3, 2)));
    }
}
