use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ubasis::make_u;
use crate::error::{Error, Result};
use crate::exact::rational::int;
use crate::exact::{CertInterval, Dyadic, FormalSum, Rational, ScalarExpr};
use crate::norms::{p_norm, tail_bound, BoundedSeq, PExponent};
use crate::seq::{truncate, SeqExpr, TruncatedVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "inputKind", rename_all = "camelCase")]
pub enum OperatorInput {
    BoundedSeq { t: BoundedSeq },
    SummableSeq { t: SeqExpr, x: SeqExpr },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperatorRun {
    pub input: OperatorInput,
    pub p: PExponent,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "L")]
    pub l: u64,
    /// The finite image Σ_{n<=N} before truncation.
    pub image: SeqExpr,
    pub output: TruncatedVector,
    pub remainder_bound: CertInterval,
}

fn push_weighted(terms: &mut Vec<(ScalarExpr, Arc<SeqExpr>)>, coeff: &FormalSum, scale: &ScalarExpr, v: &Arc<SeqExpr>) {
    for c in coeff.terms() {
        terms.push((c.mul(scale), Arc::clone(v)));
    }
}

fn combo(terms: Vec<(ScalarExpr, Arc<SeqExpr>)>) -> SeqExpr {
    if terms.is_empty() {
        SeqExpr::zero()
    } else {
        SeqExpr::lin_combo(terms).expect("weights are nonzero")
    }
}

/// C^q Σ_{n>N} 2^{-qn} = C^q 2^{-q(N+1)} / (1 - 2^{-q}).
fn geometric_remainder(c: &Rational, q: &Rational, n: u64, precision: u32) -> Result<CertInterval> {
    if c.is_zero() {
        return Ok(CertInterval::zero(precision));
    }
    let g = precision + 16;
    let cq = ScalarExpr::from_rational(c.clone()).pow(q)?;
    let head = cq.mul(&ScalarExpr::power(&int(2), &-(q * int(n as i64 + 1)))?);
    if q.is_one() {
        return Ok(head.mul_rational(&int(2)).enclose(precision));
    }
    let den = CertInterval::from_int(1, g).sub(&ScalarExpr::power(&int(2), &-q.clone())?.enclose(g));
    let out = head.enclose(g).div(&den).ok_or(Error::UncertifiableSup)?;
    Ok(out.with_precision(precision))
}

/// T t = Σ_{n>=2} t_n 2^{-n} u_n cut off after n = N.
pub fn apply_t_linea(t: &BoundedSeq, n_terms: u64, l: u64, p: &PExponent, precision: u32) -> Result<OperatorRun> {
    if n_terms < 2 {
        return Err(Error::InvalidInput(format!("N must be at least 2, got {n_terms}")));
    }
    let c = t.sup_bound(precision).ok_or(Error::UncertifiableSup)?;
    let mut terms = Vec::new();
    for n in 2..=n_terms {
        let tn = t.value(n);
        if tn.is_zero() {
            continue;
        }
        let u = Arc::new(make_u(n, p)?);
        let w = ScalarExpr::power(&int(2), &-int(n as i64))?;
        push_weighted(&mut terms, &tn, &w, &u);
    }
    let image = combo(terms);
    let remainder = if t.vanishes_from(n_terms + 1) {
        CertInterval::zero(precision)
    } else {
        geometric_remainder(&c, &p.q().q, n_terms, precision)?
    };
    Ok(OperatorRun {
        input: OperatorInput::BoundedSeq { t: t.clone() },
        p: p.clone(),
        n: n_terms,
        l,
        output: truncate(&image, l, p, precision),
        image,
        remainder_bound: remainder,
    })
}

/// The j-th member of the pointwise family: coordinate n is j^{-n} x_n.
pub fn make_pointwise_family(x: &SeqExpr, j: u64) -> SeqExpr {
    if j <= 1 {
        return x.clone();
    }
    let inv = ScalarExpr::from_rational(Rational::new(1.into(), (j as i64).into()));
    let pow = |k: u64| inv.powi(k as i64).expect("nonzero");
    match x {
        SeqExpr::FiniteSupport(entries) => {
            SeqExpr::FiniteSupport(entries.iter().map(|(k, v)| (*k, v.mul(&pow(*k)))).collect())
        }
        SeqExpr::PowerTail { coefficient, ratio, start } => SeqExpr::PowerTail {
            coefficient: coefficient.mul(&pow(*start)),
            ratio: ratio.mul(&inv),
            start: *start,
        },
        SeqExpr::LinearCombo(terms) => SeqExpr::LinearCombo(
            terms.iter().map(|(w, s)| (w.clone(), Arc::new(make_pointwise_family(s, j)))).collect(),
        ),
    }
}

/// T t = Σ_{j>=1} t_j u_j over the pointwise family of x, cut off after j = N.
/// The dropped tail is dominated coordinatewise by S·|x| with
/// S = Σ_{j>N}|t_j|, so its size is at most S^q ‖x‖.
pub fn apply_t_pointwise(t: &SeqExpr, x: &SeqExpr, n_terms: u64, l: u64, p: &PExponent, precision: u32) -> Result<OperatorRun> {
    let g = precision + 16;
    let s = tail_bound(t, n_terms, &PExponent::one(), g).ok_or(Error::UncertifiableTail(n_terms))?;
    let mut terms = Vec::new();
    for j in 1..=n_terms {
        let tj = t.coord(j);
        if tj.is_zero() {
            continue;
        }
        push_weighted(&mut terms, &tj, &ScalarExpr::one(), &Arc::new(make_pointwise_family(x, j)));
    }
    let image = combo(terms);
    let remainder = if s.enclosure.hi().is_zero() {
        CertInterval::zero(precision)
    } else {
        let xn = p_norm(x, p, l.max(1), g)?;
        let sq = CertInterval::new(Dyadic::zero(), s.enclosure.hi().clone(), g).pow_rational(&p.q().q)?;
        let hi = sq.mul(&xn).hi().clone();
        CertInterval::new(Dyadic::zero(), hi, precision)
    };
    Ok(OperatorRun {
        input: OperatorInput::SummableSeq { t: t.clone(), x: x.clone() },
        p: p.clone(),
        n: n_terms,
        l,
        output: truncate(&image, l, p, precision),
        image,
        remainder_bound: remainder,
    })
}
