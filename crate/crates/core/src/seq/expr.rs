use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{FormalSum, Rational, ScalarExpr, Sign};

/// Lazy infinite sequence indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqExpr {
    FiniteSupport(Vec<(u64, ScalarExpr)>),
    /// Coordinate `start + k` equals `coefficient * ratio^k` for `k >= 0`.
    PowerTail { coefficient: ScalarExpr, ratio: ScalarExpr, start: u64 },
    LinearCombo(Vec<(ScalarExpr, Arc<SeqExpr>)>),
}

fn ratio_in_unit_interval(r: &ScalarExpr) -> Result<()> {
    let mut prec = 64;
    while prec <= 4096 {
        let i = r.enclose(prec);
        if i.sign() == Sign::Positive && i.hi_rational() < Rational::from_integer(1.into()) {
            return Ok(());
        }
        if i.sign() == Sign::Negative || i.lo_rational() >= Rational::from_integer(1.into()) || r.is_zero() {
            break;
        }
        prec *= 4;
    }
    Err(Error::InvalidInput(format!("power tail ratio {r} is not certified in (0,1)")))
}

impl SeqExpr {
    pub fn zero() -> Self {
        SeqExpr::FiniteSupport(Vec::new())
    }

    pub fn unit(k: u64) -> Self {
        SeqExpr::FiniteSupport(vec![(k, ScalarExpr::one())])
    }

    pub fn finite(entries: Vec<(u64, ScalarExpr)>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidInput("finite support indices must be strictly increasing".into()));
            }
        }
        if entries.iter().any(|(k, v)| *k == 0 || v.is_zero()) {
            return Err(Error::InvalidInput("finite support needs positive indices and nonzero values".into()));
        }
        Ok(SeqExpr::FiniteSupport(entries))
    }

    /// Builds a finite-support sequence from a dense list, skipping zeros.
    pub fn from_dense(values: &[Rational]) -> Self {
        SeqExpr::FiniteSupport(
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                .map(|(i, v)| (i as u64 + 1, ScalarExpr::from_rational(v.clone())))
                .collect(),
        )
    }

    pub fn power_tail(coefficient: ScalarExpr, ratio: ScalarExpr, start: u64) -> Result<Self> {
        if start == 0 {
            return Err(Error::InvalidInput("power tail start index must be positive".into()));
        }
        ratio_in_unit_interval(&ratio)?;
        Ok(SeqExpr::PowerTail { coefficient, ratio, start })
    }

    pub fn lin_combo(terms: Vec<(ScalarExpr, Arc<SeqExpr>)>) -> Result<Self> {
        if terms.iter().any(|(w, _)| w.is_zero()) {
            return Err(Error::InvalidInput("linear combination weights must be nonzero".into()));
        }
        Ok(SeqExpr::LinearCombo(terms))
    }

    /// `w * self`; zero weight gives the zero sequence.
    pub fn scale(self: &Arc<Self>, w: &ScalarExpr) -> SeqExpr {
        if w.is_zero() {
            return SeqExpr::zero();
        }
        SeqExpr::LinearCombo(vec![(w.clone(), Arc::clone(self))])
    }

    /// Exact value of coordinate `k` (1-based).
    pub fn coord(&self, k: u64) -> FormalSum {
        match self {
            SeqExpr::FiniteSupport(entries) => match entries.binary_search_by_key(&k, |(i, _)| *i) {
                Ok(pos) => FormalSum::from_scalar(&entries[pos].1),
                Err(_) => FormalSum::zero(),
            },
            SeqExpr::PowerTail { coefficient, ratio, start } => {
                if k < *start || coefficient.is_zero() {
                    return FormalSum::zero();
                }
                let p = ratio.powi((k - start) as i64).expect("ratio is nonzero");
                FormalSum::from_scalar(&coefficient.mul(&p))
            }
            SeqExpr::LinearCombo(terms) => {
                let mut acc = FormalSum::zero();
                for (w, t) in terms {
                    let c = t.coord(k);
                    if !c.is_zero() {
                        acc = acc.add(&c.scale(w));
                    }
                }
                acc
            }
        }
    }

    /// Last index that can be nonzero, or `None` for infinite support.
    pub fn support_end(&self) -> Option<u64> {
        match self {
            SeqExpr::FiniteSupport(e) => Some(e.last().map(|(k, _)| *k).unwrap_or(0)),
            SeqExpr::PowerTail { coefficient, .. } => coefficient.is_zero().then_some(0),
            SeqExpr::LinearCombo(terms) => {
                let mut end = 0;
                for (_, t) in terms {
                    end = end.max(t.support_end()?);
                }
                Some(end)
            }
        }
    }

    /// First index that can be nonzero by construction (a lower bound).
    pub fn support_start(&self) -> u64 {
        match self {
            SeqExpr::FiniteSupport(e) => e.first().map(|(k, _)| *k).unwrap_or(u64::MAX),
            SeqExpr::PowerTail { coefficient, start, .. } => {
                if coefficient.is_zero() {
                    u64::MAX
                } else {
                    *start
                }
            }
            SeqExpr::LinearCombo(terms) => terms.iter().map(|(_, t)| t.support_start()).min().unwrap_or(u64::MAX),
        }
    }

    pub fn coords(&self, from: u64, to: u64) -> Vec<FormalSum> {
        (from..=to).map(|k| self.coord(k)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct EntryWire {
    index: u64,
    value: ScalarExpr,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    weight: ScalarExpr,
    term: SeqExpr,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SeqWire {
    Finite { entries: Vec<EntryWire> },
    Powertail { coefficient: ScalarExpr, ratio: ScalarExpr, start: u64 },
    Combo { terms: Vec<TermWire> },
}

impl Serialize for SeqExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            SeqExpr::FiniteSupport(e) => SeqWire::Finite {
                entries: e.iter().map(|(index, value)| EntryWire { index: *index, value: value.clone() }).collect(),
            },
            SeqExpr::PowerTail { coefficient, ratio, start } => SeqWire::Powertail {
                coefficient: coefficient.clone(),
                ratio: ratio.clone(),
                start: *start,
            },
            SeqExpr::LinearCombo(t) => SeqWire::Combo {
                terms: t
                    .iter()
                    .map(|(w, s)| TermWire { weight: w.clone(), term: (**s).clone() })
                    .collect(),
            },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeqExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = match SeqWire::deserialize(d)? {
            SeqWire::Finite { entries } => SeqExpr::finite(entries.into_iter().map(|e| (e.index, e.value)).collect()),
            SeqWire::Powertail { coefficient, ratio, start } => SeqExpr::power_tail(coefficient, ratio, start),
            SeqWire::Combo { terms } => {
                SeqExpr::lin_combo(terms.into_iter().map(|t| (t.weight, Arc::new(t.term))).collect())
            }
        };
        r.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ScalarExpr {
        ScalarExpr::from_rational(rat(n, d))
    }

    fn u_p1(n: i64) -> SeqExpr {
        SeqExpr::power_tail(q(n - 1, n), q(1, n), 1).unwrap()
    }

    #[test]
    fn finite_support_coordinates() {
        let s = SeqExpr::finite(vec![(3, q(5, 1))]).unwrap();
        assert_eq!(s.coord(3), FormalSum::from_rational(int(5)));
        assert!(s.coord(4).is_zero());
    }

    #[test]
    fn power_tail_third_coordinate() {
        // u_2 at p = 1, exponent index 2 sits at coordinate 3
        assert_eq!(u_p1(2).coord(3), FormalSum::from_rational(rat(1, 8)));
    }

    #[test]
    fn combos() {
        let s = Arc::new(u_p1(3));
        let id = SeqExpr::lin_combo(vec![(ScalarExpr::one(), s.clone())]).unwrap();
        let zero = SeqExpr::lin_combo(vec![(ScalarExpr::one(), s.clone()), (ScalarExpr::from_int(-1), s.clone())]).unwrap();
        for k in 1..10 {
            assert_eq!(id.coord(k), s.coord(k));
            assert!(zero.coord(k).is_zero());
        }
        let sum = SeqExpr::lin_combo(vec![(ScalarExpr::one(), Arc::new(u_p1(2))), (ScalarExpr::one(), s)]).unwrap();
        assert_eq!(sum.coord(1), FormalSum::from_rational(rat(7, 6)));
    }

    #[test]
    fn invariants_rejected() {
        assert!(SeqExpr::finite(vec![(2, q(1, 1)), (2, q(1, 1))]).is_err());
        assert!(SeqExpr::finite(vec![(2, ScalarExpr::zero())]).is_err());
        assert!(SeqExpr::power_tail(q(1, 1), q(1, 1), 1).is_err());
        assert!(SeqExpr::power_tail(q(1, 1), q(-1, 2), 1).is_err());
        assert!(SeqExpr::lin_combo(vec![(ScalarExpr::zero(), Arc::new(SeqExpr::zero()))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let root2 = ScalarExpr::power(&rat(1, 2), &rat(1, 2)).unwrap();
        let s = SeqExpr::lin_combo(vec![
            (q(3, 4), Arc::new(SeqExpr::power_tail(root2.clone(), root2, 2).unwrap())),
            (q(-1, 1), Arc::new(SeqExpr::finite(vec![(1, q(2, 3)), (7, q(-5, 1))]).unwrap())),
        ])
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: SeqExpr = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let parsed: SeqExpr = serde_json::from_str(
            r#"{"kind":"powertail","coefficient":[{"base":"2/3","exp":"1/2"}],"ratio":"1/3","start":1}"#,
        )
        .unwrap();
        assert!(matches!(parsed, SeqExpr::PowerTail { start: 1, .. }));
        assert!(serde_json::from_str::<SeqExpr>(r#"{"kind":"powertail","coefficient":"1","ratio":"3/2","start":1}"#).is_err());
        assert!(serde_json::from_str::<SeqExpr>(r#"{"kind":"finite"}"#).is_err());
    }

    proptest! {
        #[test]
        fn linearity(a in -9i64..9, b in -9i64..9, k in 1u64..12, c in 1i64..9, d in 2i64..9) {
            prop_assume!(a != 0 && b != 0);
            let s = Arc::new(SeqExpr::power_tail(q(c, 1), q(1, d), 2).unwrap());
            let t = Arc::new(SeqExpr::finite(vec![(k, q(c, d)), (k + 3, q(-1, c))]).unwrap());
            let combo = SeqExpr::lin_combo(vec![(q(a, 1), s.clone()), (q(b, 1), t.clone())]).unwrap();
            for i in 1..16 {
                let expect = s.coord(i).scale(&q(a, 1)).add(&t.coord(i).scale(&q(b, 1)));
                prop_assert_eq!(combo.coord(i), expect);
            }
        }
    }
}
