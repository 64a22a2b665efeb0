use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::engine::{collapse_trace, BuildConfig};
use super::oracle::SubspaceOracle;
use super::trace::{eps, ConstructionTrace};
use crate::error::{Error, Result};
use crate::exact::rational::int;
use crate::exact::{pow_enclose, CertInterval, Rational};
use crate::norms::PExponent;
use crate::seq::TruncatedVector;

pub const COLLAPSE_SCHEMA: &str = "seqspace-collapse/1";

#[derive(Clone, Debug)]
pub struct CollapseConfig {
    pub p: PExponent,
    pub window: u64,
    pub precision: u32,
    /// Vectors built per n; corrections reach depth K − 1.
    pub k: usize,
    pub n_max: u64,
    /// m_{1,1}; v_{1,1} comes from W_{m_{1,1} − 1}.
    pub m11: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CollapseRow {
    pub n: u64,
    pub trace: ConstructionTrace,
    /// ‖y_{n,1} − v_{1,1}‖ enclosure.
    pub distance_bound: CertInterval,
    /// Computed upper end plus the uncorrected remainder.
    #[serde(with = "crate::exact::rational::serde_str")]
    pub certified_upper: Rational,
    /// Σ_{j≥1} ε_{1+j} = 1/(n(n+1)).
    #[serde(with = "crate::exact::rational::serde_str")]
    pub schedule_tail: Rational,
    /// 1/((n+1)^q − 1).
    pub schedule_sum: CertInterval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SignCheck {
    pub closed_form: String,
    pub rejected_form: String,
    /// The rejected form evaluated at j = 2; negative, so it cannot bound a norm.
    pub rejected_value_at_two: CertInterval,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CollapseReport {
    pub schema: String,
    pub m11: u64,
    pub rows: Vec<CollapseRow>,
    pub sign_check: SignCheck,
}

/// 1/(j^q − 1) and the sign-flipped variant at j.
pub fn schedule_sum(j: u64, q: &Rational, precision: u32) -> Result<CertInterval> {
    let jq = pow_enclose(&int(j as i64), q, precision)?;
    let one = CertInterval::from_int(1, precision);
    one.div(&jq.sub(&one)).ok_or_else(|| Error::InvalidInput(format!("1/({j}^q - 1) is not certified finite")))
}

pub fn sign_check(q: &Rational, precision: u32) -> Result<SignCheck> {
    let rejected = schedule_sum(2, q, precision)?.neg();
    Ok(SignCheck {
        closed_form: "1/(j^q-1)".into(),
        rejected_form: "1/(1-j^q)".into(),
        rejected_value_at_two: rejected,
        note: "sum_{k>=1} j^(-qk) = 1/(j^q-1); the form 1/(1-j^q) is negative for j >= 2 and is treated as a sign typo".into(),
    })
}

pub fn distance_row(n: u64, trace: ConstructionTrace, q: &Rational, precision: u32) -> Result<CollapseRow> {
    let first = &trace.outputs[0];
    let computed = match first.cauchy.iter().find(|c| c.r == 0 && c.m as usize == first.corrections.len()) {
        Some(c) => c.norm.clone(),
        None => CertInterval::zero(precision),
    };
    let rem = first.remainder.clone();
    let certified_upper = computed.hi_rational() + &rem;
    let schedule_tail = eps(n + 1, 1) / int(n as i64);
    let lo = (computed.lo_rational() - &rem).max(Rational::zero());
    let hi = if rem.is_zero() { computed.hi_rational() } else { schedule_tail.clone() };
    let distance_bound = CertInterval::from_rationals(&lo, &hi.max(lo.clone()), precision);
    Ok(CollapseRow { n, trace, distance_bound, certified_upper, schedule_tail, schedule_sum: schedule_sum(n + 1, q, precision)? })
}

/// For n = 1..n_max: the ε = (n+1)^{-k} family started from the same
/// v_{1,1}, and the enclosure of ‖y_{n,1} − v_{1,1}‖.
pub fn collapse_sequence(oracle: &SubspaceOracle, cfg: &CollapseConfig) -> Result<CollapseReport> {
    if cfg.n_max == 0 || cfg.m11 == 0 {
        return Err(Error::InvalidInput("nMax and m_{1,1} must be positive".into()));
    }
    let q = cfg.p.q().q;
    let v11 = oracle.vector_in(cfg.m11 - 1, &BTreeSet::new(), cfg.window)?;
    let mut rows = Vec::new();
    for n in 1..=cfg.n_max {
        let bc = BuildConfig { p: cfg.p.clone(), window: cfg.window, precision: cfg.precision, eps_base: n + 1 };
        let trace = collapse_trace(oracle, &bc, cfg.m11, v11.clone(), cfg.k)?;
        rows.push(distance_row(n, trace, &q, cfg.precision)?);
    }
    Ok(CollapseReport { schema: COLLAPSE_SCHEMA.into(), m11: cfg.m11, rows, sign_check: sign_check(&q, cfg.precision)? })
}

impl CollapseRow {
    pub fn y(&self) -> &TruncatedVector {
        &self.trace.outputs[0].section
    }

    pub fn upper(&self) -> Rational {
        self.distance_bound.hi_rational()
    }
}

pub fn strictly_decreasing(uppers: &[Rational]) -> bool {
    uppers.windows(2).all(|w| w[1] < w[0] || (w[0].is_zero() && w[1].is_zero()))
}

pub fn below_one_over_n(row: &CollapseRow) -> bool {
    row.upper() <= Rational::one() / int(row.n as i64)
}
