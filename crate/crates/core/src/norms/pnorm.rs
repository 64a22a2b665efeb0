use std::sync::Arc;

use num_traits::One;

use super::exponent::PExponent;
use crate::error::{Error, Result};
use crate::exact::{eval_sum, CertInterval, Dyadic, FormalSum, Rational, ScalarExpr};
use crate::seq::SeqExpr;

const GUARD: u32 = 16;

/// Sum of p-th powers split into an exact part and an enclosed remainder.
#[derive(Clone, Debug)]
pub struct PowerSum {
    pub exact: FormalSum,
    pub approx: Option<CertInterval>,
}

impl PowerSum {
    fn zero() -> Self {
        PowerSum { exact: FormalSum::zero(), approx: None }
    }

    fn add_interval(&mut self, i: CertInterval) {
        self.approx = Some(match self.approx.take() {
            Some(a) => a.add(&i),
            None => i,
        });
    }

    pub fn enclose(&self, precision: u32) -> CertInterval {
        let e = eval_sum(&self.exact, precision);
        match &self.approx {
            Some(a) => e.add(a),
            None => e,
        }
    }
}

/// Bound on Σ_{k>L}|s_k|^p, or on sup_{k>L}|s_k| for p = ∞. When `tight`
/// the enclosure contains the true value; otherwise only its upper end is
/// meaningful and the lower end is 0.
#[derive(Clone, Debug)]
pub struct TailBound {
    pub enclosure: CertInterval,
    pub exact: Option<FormalSum>,
    pub tight: bool,
}

impl TailBound {
    fn zero(precision: u32) -> Self {
        TailBound { enclosure: CertInterval::zero(precision), exact: Some(FormalSum::zero()), tight: true }
    }

    fn from_exact(s: FormalSum, precision: u32) -> Self {
        TailBound { enclosure: eval_sum(&s, precision), exact: Some(s), tight: true }
    }

    fn upper(hi: Dyadic, precision: u32) -> Self {
        TailBound { enclosure: CertInterval::new(Dyadic::zero(), hi, precision), exact: None, tight: false }
    }
}

/// |c|^p of one coordinate: exact when the coordinate is a monomial.
pub fn coord_power(c: &FormalSum, p: &Rational, precision: u32) -> std::result::Result<ScalarExpr, CertInterval> {
    if let Some(m) = c.as_monomial() {
        return Ok(m.abs().pow(p).expect("nonnegative base"));
    }
    let e = eval_sum(c, precision).abs();
    Err(e.pow_rational(p).expect("nonnegative interval"))
}

pub fn head_power_sum(s: &SeqExpr, l: u64, p: &Rational, precision: u32) -> PowerSum {
    let mut acc = PowerSum::zero();
    for k in 1..=l {
        let c = s.coord(k);
        if c.is_zero() {
            continue;
        }
        match coord_power(&c, p, precision) {
            Ok(m) => acc.exact.add_scalar(&m),
            Err(i) => acc.add_interval(i),
        }
    }
    acc
}

pub fn head_sup(s: &SeqExpr, l: u64, precision: u32) -> CertInterval {
    let mut acc = CertInterval::zero(precision);
    for k in 1..=l {
        let c = s.coord(k);
        if !c.is_zero() {
            acc = acc.max(&eval_sum(&c, precision).abs());
        }
    }
    acc
}

pub fn tail_bound(s: &SeqExpr, l: u64, p: &PExponent, precision: u32) -> Option<TailBound> {
    if s.support_end().is_some_and(|e| e <= l) {
        return Some(TailBound::zero(precision));
    }
    match s {
        SeqExpr::FiniteSupport(entries) => {
            let beyond = entries.iter().filter(|(k, _)| *k > l);
            match p {
                PExponent::Finite(p) => {
                    let mut sum = FormalSum::zero();
                    for (_, v) in beyond {
                        sum.add_scalar(&v.abs().pow(p).expect("nonnegative base"));
                    }
                    Some(TailBound::from_exact(sum, precision))
                }
                PExponent::Infinity => {
                    let mut acc = CertInterval::zero(precision);
                    let mut best: Option<ScalarExpr> = None;
                    let mut all_rational = true;
                    for (_, v) in beyond {
                        acc = acc.max(&v.abs().enclose(precision));
                        match (v.abs().as_rational().cloned(), &best) {
                            (Some(r), Some(b)) => {
                                if r > *b.coefficient() {
                                    best = Some(ScalarExpr::from_rational(r));
                                }
                            }
                            (Some(r), None) => best = Some(ScalarExpr::from_rational(r)),
                            (None, _) => all_rational = false,
                        }
                    }
                    match (all_rational, best) {
                        (true, Some(b)) => Some(TailBound::from_exact(FormalSum::from_scalar(&b), precision)),
                        _ => Some(TailBound { enclosure: acc, exact: None, tight: true }),
                    }
                }
            }
        }
        SeqExpr::PowerTail { coefficient, ratio, start } => {
            let first = (l + 1).max(*start);
            let j0 = (first - start) as i64;
            match p {
                PExponent::Finite(p) => {
                    let cp = coefficient.abs().pow(p).ok()?;
                    let rp = ratio.pow(p).ok()?;
                    let lead = cp.mul(&rp.powi(j0).ok()?);
                    if let Some(r) = rp.as_rational() {
                        let factor = (Rational::one() - r).recip();
                        return Some(TailBound::from_exact(
                            FormalSum::from_scalar(&lead.mul_rational(&factor)),
                            precision,
                        ));
                    }
                    let g = precision + GUARD;
                    let denom = CertInterval::from_int(1, g).sub(&rp.enclose(g));
                    let e = lead.enclose(g).div(&denom)?;
                    Some(TailBound { enclosure: e.with_precision(precision), exact: None, tight: true })
                }
                PExponent::Infinity => {
                    let sup = coefficient.abs().mul(&ratio.powi(j0).ok()?);
                    Some(TailBound::from_exact(FormalSum::from_scalar(&sup), precision))
                }
            }
        }
        SeqExpr::LinearCombo(terms) => {
            let tails: Option<Vec<(ScalarExpr, TailBound)>> = terms
                .iter()
                .map(|(w, t)| tail_bound(t, l, p, precision).map(|b| (w.clone(), b)))
                .collect();
            let tails = tails?;
            let live: Vec<&(ScalarExpr, TailBound)> = tails.iter().filter(|(_, b)| !b.enclosure.is_zero()).collect();
            if live.is_empty() {
                return Some(TailBound::zero(precision));
            }
            if live.len() == 1 && live[0].1.tight {
                let (w, b) = live[0];
                let scale = match p {
                    PExponent::Finite(p) => w.abs().pow(p).ok()?,
                    PExponent::Infinity => w.abs(),
                };
                return Some(match &b.exact {
                    Some(x) => TailBound::from_exact(x.scale(&scale), precision),
                    None => TailBound {
                        enclosure: b.enclosure.mul(&scale.enclose(precision + GUARD)).with_precision(precision),
                        exact: None,
                        tight: true,
                    },
                });
            }
            let g = precision + GUARD;
            let hi = match p {
                PExponent::Finite(p) if *p <= Rational::one() => {
                    let mut acc = CertInterval::zero(g);
                    for (w, b) in &live {
                        let wp = w.abs().pow(p).ok()?.enclose(g);
                        acc = acc.add(&wp.mul(&upper_of(&b.enclosure, g)));
                    }
                    acc
                }
                PExponent::Finite(p) => {
                    let inv = p.recip();
                    let mut acc = CertInterval::zero(g);
                    for (w, b) in &live {
                        let root = upper_of(&b.enclosure, g).pow_rational(&inv).ok()?;
                        acc = acc.add(&w.abs().enclose(g).mul(&root));
                    }
                    acc.pow_rational(p).ok()?
                }
                PExponent::Infinity => {
                    let mut acc = CertInterval::zero(g);
                    for (w, b) in &live {
                        acc = acc.add(&w.abs().enclose(g).mul(&upper_of(&b.enclosure, g)));
                    }
                    acc
                }
            };
            Some(TailBound::upper(hi.hi().clone(), precision))
        }
    }
}

fn upper_of(i: &CertInterval, precision: u32) -> CertInterval {
    CertInterval::point(i.hi().clone(), precision)
}

/// Certified enclosure of ‖s‖_p: the p-th-power sum without root for
/// p < 1, the p-th root of it for finite p ≥ 1, and the supremum for ∞.
pub fn p_norm(s: &SeqExpr, p: &PExponent, l: u64, precision: u32) -> Result<CertInterval> {
    let g = precision + GUARD;
    let tail = tail_bound(s, l, p, g).ok_or(Error::UncertifiableTail(l))?;
    match p {
        PExponent::Infinity => {
            let head = head_sup(s, l, g);
            let out = if tail.tight {
                head.max(&tail.enclosure)
            } else {
                let hi = head.hi().clone().max(tail.enclosure.hi().clone());
                CertInterval::new(head.lo().clone(), hi, g)
            };
            Ok(out.with_precision(precision))
        }
        PExponent::Finite(pv) => {
            let head = head_power_sum(s, l, pv, g);
            let root = pv.recip();
            if let (None, Some(t)) = (&head.approx, &tail.exact) {
                let total = head.exact.add(t);
                if *pv <= Rational::one() {
                    return Ok(eval_sum(&total, precision));
                }
                if let Some(m) = total.as_monomial() {
                    return Ok(m.pow(&root).expect("nonnegative").enclose(precision));
                }
                let e = eval_sum(&total, g).pow_rational(&root)?;
                return Ok(e.with_precision(precision));
            }
            let h = head.enclose(g);
            let sum = if tail.tight {
                h.add(&tail.enclosure)
            } else {
                CertInterval::new(h.lo().clone(), h.hi().add(tail.enclosure.hi()), g)
            };
            let sum = clamp_nonnegative(&sum);
            let out = if *pv <= Rational::one() { sum } else { sum.pow_rational(&root)? };
            Ok(out.with_precision(precision))
        }
    }
}

fn clamp_nonnegative(i: &CertInterval) -> CertInterval {
    if i.lo().signum() >= 0 {
        return i.clone();
    }
    CertInterval::new(Dyadic::zero(), i.hi().clone().max(Dyadic::zero()), i.precision())
}

/// ‖w·s‖ evaluated through a one-term combination.
pub fn scaled_norm(s: &Arc<SeqExpr>, w: &ScalarExpr, p: &PExponent, l: u64, precision: u32) -> Result<CertInterval> {
    if w.is_zero() {
        return Ok(CertInterval::zero(precision));
    }
    p_norm(&s.scale(w), p, l, precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ScalarExpr {
        ScalarExpr::from_rational(rat(n, d))
    }

    fn u(n: i64, p: &PExponent) -> SeqExpr {
        match p {
            PExponent::Finite(p) => {
                let inv = p.recip();
                SeqExpr::power_tail(
                    ScalarExpr::power(&rat(n - 1, n), &inv).unwrap(),
                    ScalarExpr::power(&int(n), &-inv).unwrap(),
                    1,
                )
                .unwrap()
            }
            PExponent::Infinity => SeqExpr::power_tail(ScalarExpr::one(), q(1, n), 1).unwrap(),
        }
    }

    #[test]
    fn zero_sequence_has_zero_norm() {
        for p in ["1/2", "1", "3", "inf"] {
            let p: PExponent = p.parse().unwrap();
            assert!(p_norm(&SeqExpr::zero(), &p, 5, 64).unwrap().is_zero());
        }
    }

    #[test]
    fn three_four_five() {
        let s = SeqExpr::finite(vec![(1, q(3, 1)), (2, q(4, 1))]).unwrap();
        let n = p_norm(&s, &"2".parse().unwrap(), 2, 64).unwrap();
        assert_eq!((n.lo_rational(), n.hi_rational()), (int(5), int(5)));
        // window shorter than the support still gives the exact tail
        let n = p_norm(&s, &"2".parse().unwrap(), 1, 64).unwrap();
        assert_eq!((n.lo_rational(), n.hi_rational()), (int(5), int(5)));
    }

    #[test]
    fn u7_half_norm_is_one() {
        let p: PExponent = "1/2".parse().unwrap();
        let n = p_norm(&u(7, &p), &p, 4, 256).unwrap();
        assert!(n.is_degenerate());
        assert_eq!(n.lo_rational(), int(1));
    }

    #[test]
    fn u_norms_exact_for_all_p() {
        for ps in ["1/2", "1", "2", "inf", "1/3", "3"] {
            let p: PExponent = ps.parse().unwrap();
            for n in 2..12 {
                let v = p_norm(&u(n, &p), &p, 6, 128).unwrap();
                assert_eq!((v.lo_rational(), v.hi_rational()), (int(1), int(1)), "p={ps} n={n}");
            }
        }
    }

    #[test]
    fn irrational_tail_ratio_uses_intervals() {
        // ratio 2^(-1/2) at p = 1: sum = 1/(1 - 2^(-1/2)) = 3.41421356...
        let s = SeqExpr::power_tail(ScalarExpr::one(), ScalarExpr::power(&int(2), &rat(-1, 2)).unwrap(), 1).unwrap();
        let n = p_norm(&s, &PExponent::one(), 3, 128).unwrap();
        assert!(n.lo_rational() < rat(341421357, 100000000) && n.hi_rational() > rat(341421356, 100000000));
        assert!(n.width() < rat(1, 1 << 60));
    }

    #[test]
    fn combo_tail_is_an_upper_bound() {
        let a = Arc::new(SeqExpr::power_tail(q(1, 1), q(1, 2), 1).unwrap());
        let b = Arc::new(SeqExpr::power_tail(q(1, 1), q(1, 3), 1).unwrap());
        let s = SeqExpr::lin_combo(vec![(q(1, 1), a), (q(-1, 1), b)]).unwrap();
        // exact: sum (2^-k - 3^-k) for k >= 0 = 2 - 3/2 = 1/2
        let n = p_norm(&s, &PExponent::one(), 40, 128).unwrap();
        assert!(n.contains(&rat(1, 2)));
        assert!(n.width() < rat(1, 1_000_000_000));
    }

    fn finite_seq() -> impl Strategy<Value = SeqExpr> {
        prop::collection::vec((-20i64..20, 1i64..6), 1..7).prop_map(|v| {
            SeqExpr::finite(
                v.into_iter()
                    .enumerate()
                    .filter(|(_, (n, _))| *n != 0)
                    .map(|(i, (n, d))| (i as u64 + 1, q(n, d)))
                    .collect(),
            )
            .unwrap()
        })
    }

    fn rational_pow_f64(v: &Rational, p: f64) -> f64 {
        crate::exact::rational::to_f64(v).abs().powf(p)
    }

    proptest! {
        #[test]
        fn p_triangle_for_quasi_norms(s in finite_seq(), t in finite_seq(), pd in 2i64..6) {
            let p = PExponent::finite(rat(1, pd)).unwrap();
            let sum = SeqExpr::lin_combo(vec![(ScalarExpr::one(), Arc::new(s.clone())), (ScalarExpr::one(), Arc::new(t.clone()))]).unwrap();
            let prec = 96;
            let lhs = p_norm(&sum, &p, 8, prec).unwrap();
            let rhs = p_norm(&s, &p, 8, prec).unwrap().add(&p_norm(&t, &p, 8, prec).unwrap());
            let slack = crate::exact::rational::pow_int(&int(2), -(prec as i64 / 2));
            prop_assert!(lhs.hi_rational() <= rhs.hi_rational() + slack);
        }

        #[test]
        fn scaling_law(s in finite_seq(), c in 1i64..9, d in 1i64..9, pn in 1i64..4, pd in 1i64..4) {
            let p = PExponent::finite(rat(pn, pd)).unwrap();
            let pv = rat(pn, pd);
            let base = p_norm(&s, &p, 8, 128).unwrap();
            let scaled = p_norm(&Arc::new(s.clone()).scale(&q(c, d)), &p, 8, 128).unwrap();
            let factor = if pv < int(1) { ScalarExpr::from_rational(rat(c, d)).pow(&pv).unwrap() } else { q(c, d) };
            let expect = base.mul(&factor.enclose(160));
            prop_assert!(scaled.lo() <= expect.hi() && expect.lo() <= scaled.hi());
        }

        #[test]
        fn agrees_with_float_summation(s in finite_seq(), pn in 1i64..5, pd in 1i64..4) {
            let pv = rat(pn, pd);
            let p = PExponent::finite(pv.clone()).unwrap();
            let pf = crate::exact::rational::to_f64(&pv);
            let mut acc = 0.0f64;
            for k in 1..=8 {
                if let Some(r) = s.coord(k).as_rational() {
                    acc += rational_pow_f64(&r, pf);
                }
            }
            let oracle = if pv < int(1) { acc } else { acc.powf(1.0 / pf) };
            let n = p_norm(&s, &p, 8, 128).unwrap();
            let (lo, hi) = n.to_f64_pair();
            prop_assert!(lo <= oracle * (1.0 + 1e-12) + 1e-300 && oracle <= hi * (1.0 + 1e-12) + 1e-300);
        }
    }
}
