use serde::{Deserialize, Serialize};

use crate::exact::{sign_certify, Sign};
use crate::seq::{Coord, TruncatedVector};

/// Finite-window zero evidence: every index 1..=L lands in exactly one class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroAuditReport {
    pub window: u64,
    pub certified_nonzero: u64,
    pub structural_zero: Vec<u64>,
    pub indeterminate: Vec<u64>,
}

impl ZeroAuditReport {
    pub fn counts(&self) -> (u64, u64, u64) {
        (self.certified_nonzero, self.structural_zero.len() as u64, self.indeterminate.len() as u64)
    }
}

pub fn zero_audit(v: &TruncatedVector) -> ZeroAuditReport {
    let mut report = ZeroAuditReport { window: v.length, certified_nonzero: 0, structural_zero: Vec::new(), indeterminate: Vec::new() };
    for (i, c) in v.coords.iter().enumerate() {
        let k = i as u64 + 1;
        match c {
            Coord::StructuralZero => report.structural_zero.push(k),
            Coord::Value { enclosure, .. } => {
                if sign_certify(enclosure) == Sign::ContainsZero {
                    report.indeterminate.push(k);
                } else {
                    report.certified_nonzero += 1;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_u;
    use crate::exact::rational::{int, rat};
    use crate::exact::{CertInterval, FormalSum};
    use crate::norms::PExponent;
    use crate::seq::{truncate, SeqExpr};

    #[test]
    fn all_zero() {
        let r = zero_audit(&truncate(&SeqExpr::zero(), 6, &PExponent::one(), 64));
        assert_eq!(r.structural_zero, (1..=6).collect::<Vec<_>>());
        assert_eq!(r.counts(), (0, 6, 0));
    }

    #[test]
    fn u2_is_nonzero() {
        let r = zero_audit(&truncate(&make_u(2, &PExponent::one()).unwrap(), 8, &PExponent::one(), 64));
        assert_eq!(r.counts(), (8, 0, 0));
    }

    #[test]
    fn mixed_classes() {
        let eps = CertInterval::from_rationals(&rat(-1, 1000), &rat(1, 1000), 64);
        let v = TruncatedVector {
            length: 3,
            coords: vec![
                Coord::Value { sum: FormalSum::from_rational(int(1)), enclosure: CertInterval::from_int(1, 64) },
                Coord::StructuralZero,
                Coord::Value { sum: FormalSum::from_rational(rat(1, 10_000)), enclosure: eps },
            ],
            tail_norm_bound: None,
        };
        let r = zero_audit(&v);
        assert_eq!(r.counts(), (1, 1, 1));
        assert_eq!(r.structural_zero, vec![2]);
        assert_eq!(r.indeterminate, vec![3]);
    }
}
