use serde::{Deserialize, Serialize};

use super::expr::SeqExpr;
use crate::exact::{eval_sum, CertInterval, FormalSum};
use crate::norms::{tail_bound, PExponent};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coord {
    StructuralZero,
    Value { sum: FormalSum, enclosure: CertInterval },
}

impl Coord {
    pub fn is_structural_zero(&self) -> bool {
        matches!(self, Coord::StructuralZero)
    }

    pub fn sum(&self) -> FormalSum {
        match self {
            Coord::StructuralZero => FormalSum::zero(),
            Coord::Value { sum, .. } => sum.clone(),
        }
    }

    pub fn enclosure(&self, precision: u32) -> CertInterval {
        match self {
            Coord::StructuralZero => CertInterval::zero(precision),
            Coord::Value { enclosure, .. } => enclosure.clone(),
        }
    }
}

/// A length-L window onto a sequence plus a bound on what lies beyond it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedVector {
    pub length: u64,
    pub coords: Vec<Coord>,
    /// Bound on Σ_{k>L}|s_k|^p (sup for p = ∞); `None` when unavailable.
    pub tail_norm_bound: Option<CertInterval>,
}

impl TruncatedVector {
    /// Coordinate k, 1-based.
    pub fn get(&self, k: u64) -> Option<&Coord> {
        self.coords.get((k as usize).checked_sub(1)?)
    }

    pub fn sums(&self) -> Vec<FormalSum> {
        self.coords.iter().map(Coord::sum).collect()
    }
}

pub fn coord_entry(s: &FormalSum, precision: u32) -> Coord {
    if s.is_zero() {
        Coord::StructuralZero
    } else {
        Coord::Value { sum: s.clone(), enclosure: eval_sum(s, precision) }
    }
}

pub fn truncate(s: &SeqExpr, l: u64, p: &PExponent, precision: u32) -> TruncatedVector {
    let coords = (1..=l).map(|k| coord_entry(&s.coord(k), precision)).collect();
    TruncatedVector {
        length: l,
        coords,
        tail_norm_bound: tail_bound(s, l, p, precision).map(|b| b.enclosure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use crate::exact::ScalarExpr;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ScalarExpr {
        ScalarExpr::from_rational(rat(n, d))
    }

    #[test]
    fn zero_sequence() {
        let t = truncate(&SeqExpr::zero(), 10, &PExponent::one(), 64);
        assert_eq!(t.coords.len(), 10);
        assert!(t.coords.iter().all(Coord::is_structural_zero));
        assert!(t.tail_norm_bound.unwrap().is_zero());
    }

    #[test]
    fn u2_window_and_tail() {
        let u2 = SeqExpr::power_tail(q(1, 2), q(1, 2), 1).unwrap();
        let t = truncate(&u2, 5, &PExponent::one(), 64);
        let expect = [rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 16), rat(1, 32)];
        for (c, e) in t.coords.iter().zip(expect) {
            assert_eq!(c.sum().as_rational(), Some(e));
        }
        assert!(t.tail_norm_bound.unwrap().contains(&rat(1, 32)));
    }

    #[test]
    fn third_ratio_tail() {
        let s = SeqExpr::power_tail(q(1, 1), q(1, 3), 1).unwrap();
        let t = truncate(&s, 2, &PExponent::one(), 64);
        assert_eq!(t.coords[1].sum().as_rational(), Some(rat(1, 3)));
        assert!(t.tail_norm_bound.clone().unwrap().contains(&rat(1, 6)));
        assert_eq!(t.get(1).unwrap().sum().as_rational(), Some(int(1)));
    }

    proptest! {
        #[test]
        fn window_consistency(c in 1i64..20, d in 2i64..9, start in 1u64..5, l in 1u64..12, e in 1i64..4) {
            let ratio = ScalarExpr::power(&rat(1, d), &rat(1, e)).unwrap();
            let s = SeqExpr::power_tail(q(c, 3), ratio, start).unwrap();
            let t = truncate(&s, l, &PExponent::one(), 96);
            for k in 1..=l {
                let exact = s.coord(k);
                let c = t.get(k).unwrap();
                prop_assert_eq!(c.sum(), exact.clone());
                if let Some(r) = exact.as_rational() {
                    prop_assert!(c.enclosure(96).contains(&r));
                }
                prop_assert_eq!(c.is_structural_zero(), k < start);
            }
        }
    }
}
