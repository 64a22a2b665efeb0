use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{int, rat};
use crate::exact::{CertInterval, ScalarExpr};
use crate::norms::{p_norm, PExponent};
use crate::seq::SeqExpr;

/// u_n = (a_n^{1/p} n^{-k/p})_{k>=0} with a_n = (n-1)/n, or (n^{-k}) for p = ∞.
pub fn make_u(n: u64, p: &PExponent) -> Result<SeqExpr> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("u_n needs n >= 2, got {n}")));
    }
    let ni = n as i64;
    match p {
        PExponent::Finite(p) => {
            let inv = p.recip();
            SeqExpr::power_tail(ScalarExpr::power(&rat(ni - 1, ni), &inv)?, ScalarExpr::power(&int(ni), &-inv)?, 1)
        }
        PExponent::Infinity => SeqExpr::power_tail(ScalarExpr::one(), ScalarExpr::from_rational(rat(1, ni)), 1),
    }
}

/// The unit-norm family (u_n)_{n>=2} for a fixed exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UBasisFamily {
    pub p: PExponent,
    pub members: BTreeMap<u64, SeqExpr>,
}

impl UBasisFamily {
    pub fn new(p: PExponent, ns: impl IntoIterator<Item = u64>) -> Result<Self> {
        let members = ns.into_iter().map(|n| Ok((n, make_u(n, &p)?))).collect::<Result<_>>()?;
        Ok(UBasisFamily { p, members })
    }

    pub fn get(&self, n: u64) -> Option<&SeqExpr> {
        self.members.get(&n)
    }

    /// Certified ‖u_n‖_p for every member.
    pub fn norms(&self, precision: u32) -> Result<BTreeMap<u64, CertInterval>> {
        self.members.iter().map(|(n, u)| Ok((*n, p_norm(u, &self.p, 1, precision)?))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::format_rational;

    #[test]
    fn u2_at_one() {
        let u = make_u(2, &PExponent::one()).unwrap();
        let c: Vec<_> = (1..=3).map(|k| u.coord(k).as_rational().unwrap()).collect();
        assert_eq!(c, vec![rat(1, 2), rat(1, 4), rat(1, 8)]);
    }

    #[test]
    fn u5_at_infinity_and_rejects_small_n() {
        let u = make_u(5, &PExponent::Infinity).unwrap();
        assert_eq!(u.coord(1).as_rational(), Some(int(1)));
        assert_eq!(u.coord(3).as_rational(), Some(rat(1, 25)));
        assert!(make_u(1, &PExponent::one()).is_err());
        assert!(make_u(0, &PExponent::Infinity).is_err());
    }

    #[test]
    fn u7_half_norm_is_exactly_one() {
        let p: PExponent = "1/2".parse().unwrap();
        let n = p_norm(&make_u(7, &p).unwrap(), &p, 1, 128).unwrap();
        assert!(n.is_degenerate());
        assert_eq!(format_rational(&n.lo_rational()), "1/1");
    }

    #[test]
    fn normalization_grid() {
        for p in ["1/2", "1", "2", "inf"] {
            let p: PExponent = p.parse().unwrap();
            let fam = UBasisFamily::new(p.clone(), 2..=50).unwrap();
            for (n, e) in fam.norms(64).unwrap() {
                assert!(e.contains(&int(1)), "n={n} p={p}");
                assert!(e.is_degenerate(), "n={n} p={p} not exact: {e}");
            }
        }
    }

    #[test]
    fn irrational_norm_is_tight() {
        let p: PExponent = "3".parse().unwrap();
        for n in [2u64, 3, 10] {
            let e = p_norm(&make_u(n, &p).unwrap(), &p, 1, 64).unwrap();
            assert!(e.contains(&int(1)));
            assert!(e.width() < rat(1, 1 << 20).pow(3), "n={n} width too large");
        }
    }
}
