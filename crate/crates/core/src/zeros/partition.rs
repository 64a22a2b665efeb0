use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{FormalSum, Rational, ScalarExpr};
use crate::seq::SeqExpr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommonZeroReport {
    pub window: u64,
    pub positions: Vec<u64>,
    pub per_vector_zeros: Vec<Vec<u64>>,
}

pub fn structural_zeros(v: &SeqExpr, l: u64) -> Vec<u64> {
    (1..=l).filter(|&k| v.coord(k).is_zero()).collect()
}

pub fn common_zeros(vectors: &[SeqExpr], l: u64) -> CommonZeroReport {
    let per: Vec<Vec<u64>> = vectors.iter().map(|v| structural_zeros(v, l)).collect();
    let positions = match per.split_first() {
        None => (1..=l).collect(),
        Some((first, rest)) => {
            let mut acc: BTreeSet<u64> = first.iter().copied().collect();
            for z in rest {
                let s: BTreeSet<u64> = z.iter().copied().collect();
                acc = acc.intersection(&s).copied().collect();
            }
            acc.into_iter().collect()
        }
    };
    CommonZeroReport { window: l, positions, per_vector_zeros: per }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaSet {
    #[serde(with = "crate::exact::rational::serde_str")]
    pub a: Rational,
    pub members: Vec<u64>,
    /// a·x₁ − x₂ vanishes on the whole window.
    pub zero_difference: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaViolation {
    #[serde(with = "crate::exact::rational::serde_str")]
    pub a: Rational,
    #[serde(with = "crate::exact::rational::serde_str")]
    pub b: Rational,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NaPartitionReport {
    pub window: u64,
    pub common_zero: Vec<u64>,
    pub sets: Vec<NaSet>,
    pub violations: Vec<NaViolation>,
}

/// N_a = {n <= L : a x₁_n = x₂_n}; distinct a, b may only share common zeros.
pub fn na_partition_check(x1: &SeqExpr, x2: &SeqExpr, scalars: &[Rational], l: u64) -> Result<NaPartitionReport> {
    let distinct: BTreeSet<&Rational> = scalars.iter().collect();
    if distinct.len() != scalars.len() || scalars.iter().any(num_traits::Zero::is_zero) {
        return Err(Error::InvalidInput("scalars must be pairwise distinct and nonzero".into()));
    }
    let c1 = x1.coords(1, l);
    let c2 = x2.coords(1, l);
    let common: Vec<u64> = (1..=l).filter(|&k| c1[(k - 1) as usize].is_zero() && c2[(k - 1) as usize].is_zero()).collect();
    let sets: Vec<NaSet> = scalars
        .iter()
        .map(|a| {
            let w = ScalarExpr::from_rational(a.clone());
            let diff: Vec<FormalSum> = c1.iter().zip(&c2).map(|(u, v)| u.scale(&w).sub(v)).collect();
            let members: Vec<u64> = (1..=l).filter(|&k| diff[(k - 1) as usize].is_zero()).collect();
            NaSet { a: a.clone(), zero_difference: members.len() as u64 == l, members }
        })
        .collect();
    let zero: BTreeSet<u64> = common.iter().copied().collect();
    let mut violations = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let si: BTreeSet<u64> = s.members.iter().copied().collect();
        for t in &sets[i + 1..] {
            for &n in &t.members {
                if si.contains(&n) && !zero.contains(&n) {
                    violations.push(NaViolation { a: s.a.clone(), b: t.a.clone(), n });
                }
            }
        }
    }
    Ok(NaPartitionReport { window: l, common_zero: common, sets, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn evens_zero(offset: i64, l: usize) -> SeqExpr {
        SeqExpr::from_dense(&(1..=l as i64).map(|k| if k % 2 == 0 { int(0) } else { int(k + offset) }).collect::<Vec<_>>())
    }

    #[test]
    fn single_vector_evens() {
        let r = common_zeros(&[evens_zero(0, 9)], 9);
        assert_eq!(r.positions, vec![2, 4, 6, 8]);
    }

    #[test]
    fn disjoint_odd_supports() {
        let a = SeqExpr::from_dense(&[int(1), int(0), int(0), int(0), int(1)]);
        let b = SeqExpr::from_dense(&[int(0), int(0), int(2), int(0), int(0), int(0), int(3)]);
        let r = common_zeros(&[a, b], 8);
        let oracle: Vec<u64> = (1..=8).filter(|k| ![1, 3, 5, 7].contains(k)).collect();
        assert_eq!(r.positions, oracle);
    }

    #[test]
    fn units() {
        assert_eq!(common_zeros(&[SeqExpr::unit(1), SeqExpr::unit(2)], 5).positions, vec![3, 4, 5]);
    }

    #[test]
    fn scaled_copy() {
        let x1 = evens_zero(1, 8);
        let x2 = SeqExpr::lin_combo(vec![(ScalarExpr::from_int(3), Arc::new(x1.clone()))]).unwrap();
        let r = na_partition_check(&x1, &x2, &[int(1), int(3), rat(1, 2)], 8).unwrap();
        assert_eq!(r.sets[1].members, (1..=8).collect::<Vec<_>>());
        assert!(r.sets[1].zero_difference);
        assert_eq!(r.sets[0].members, vec![2, 4, 6, 8]);
        assert_eq!(r.sets[2].members, vec![2, 4, 6, 8]);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn disjoint_supports_partition() {
        let x1 = SeqExpr::from_dense(&[int(1), int(0), int(2)]);
        let x2 = SeqExpr::from_dense(&[int(0), int(5)]);
        let r = na_partition_check(&x1, &x2, &[int(1), int(-4)], 5).unwrap();
        for s in &r.sets {
            assert_eq!(s.members, r.common_zero);
        }
        assert_eq!(r.common_zero, vec![4, 5]);
    }

    #[test]
    fn units_partition() {
        let r = na_partition_check(&SeqExpr::unit(1), &SeqExpr::unit(2), &[int(1), int(2)], 3).unwrap();
        assert_eq!(r.sets[0].members, vec![3]);
        assert_eq!(r.sets[1].members, vec![3]);
        assert!(r.violations.is_empty());
        assert!(na_partition_check(&SeqExpr::unit(1), &SeqExpr::unit(2), &[int(1), int(1)], 3).is_err());
        assert!(na_partition_check(&SeqExpr::unit(1), &SeqExpr::unit(2), &[int(0)], 3).is_err());
    }

    proptest! {
        #[test]
        fn no_violations(a in prop::collection::vec(-2i64..3, 8), b in prop::collection::vec(-2i64..3, 8), sc in prop::collection::btree_set(-4i64..5, 1..5)) {
            let x1 = SeqExpr::from_dense(&a.iter().map(|&v| int(v)).collect::<Vec<_>>());
            let x2 = SeqExpr::from_dense(&b.iter().map(|&v| int(v)).collect::<Vec<_>>());
            let scalars: Vec<Rational> = sc.into_iter().filter(|&s| s != 0).map(int).collect();
            prop_assume!(!scalars.is_empty());
            let r = na_partition_check(&x1, &x2, &scalars, 10).unwrap();
            prop_assert!(r.violations.is_empty());
        }

        #[test]
        fn window_monotone(a in prop::collection::vec(-1i64..2, 12), l1 in 1u64..8, extra in 0u64..6) {
            let x = SeqExpr::from_dense(&a.iter().map(|&v| int(v)).collect::<Vec<_>>());
            let small = common_zeros(std::slice::from_ref(&x), l1);
            let big = common_zeros(&[x], l1 + extra);
            for p in small.positions {
                prop_assert!(big.positions.contains(&p));
            }
        }
    }
}
