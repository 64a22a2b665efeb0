use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{CertInterval, FormalSum, Radical, Rational, ScalarExpr};
use crate::linalg::{interval_rank_lower_bound, RatMatrix};
use crate::seq::SeqExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Interval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Independence {
    Independent,
    /// Σ witness_i v_i vanishes identically; the first nonzero weight is 1.
    Dependent { witness: Vec<ScalarExpr> },
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndependenceReport {
    pub outcome: Independence,
    pub mode_used: CheckMode,
    pub window: u64,
    pub rank_lower_bound: usize,
    pub fallback_reason: Option<String>,
}

fn scalar_of(r: &Radical) -> ScalarExpr {
    ScalarExpr::from_coeff_radical(Rational::from_integer(1.into()), r.clone())
}

/// Exact finite-section rank. Columns and then rows are divided by the
/// radical part of their first nonzero monomial; rows that do not become
/// rational are dropped. A full-rank rational subsection proves
/// independence; a rank deficit proves dependence only if no row was dropped.
pub fn exact_independence(vectors: &[SeqExpr], l: u64) -> Result<(Independence, usize)> {
    let m = vectors.len();
    let section: Vec<Vec<FormalSum>> = (1..=l).map(|k| vectors.iter().map(|v| v.coord(k)).collect()).collect();
    let col_scale: Vec<ScalarExpr> = (0..m)
        .map(|i| {
            section
                .iter()
                .filter_map(|row| row[i].as_monomial().filter(|x| !x.is_zero()))
                .map(|x| scalar_of(x.radical()))
                .next()
                .unwrap_or_else(ScalarExpr::one)
        })
        .collect();
    let mut kept = Vec::new();
    let mut dropped = 0usize;
    'rows: for row in &section {
        let mut scaled = Vec::with_capacity(m);
        for (x, g) in row.iter().zip(&col_scale) {
            let Some(x) = x.as_monomial() else {
                dropped += 1;
                continue 'rows;
            };
            scaled.push(x.div(g)?);
        }
        let row_scale = scaled.iter().find(|x| !x.is_zero()).map(|x| scalar_of(x.radical()));
        let mut rational = Vec::with_capacity(m);
        for x in &scaled {
            let y = match &row_scale {
                Some(r) => x.div(r)?,
                None => x.clone(),
            };
            match y.as_rational() {
                Some(q) => rational.push(q.clone()),
                None => {
                    dropped += 1;
                    continue 'rows;
                }
            }
        }
        kept.push(rational);
    }
    let mat = RatMatrix::from_rows(kept.clone());
    let rank = if kept.is_empty() { 0 } else { mat.rank() };
    if rank == m {
        return Ok((Independence::Independent, rank));
    }
    if dropped > 0 {
        return Err(Error::ReductionFailed(format!(
            "{dropped} of {l} coordinates are not rational after monomial scaling; rational rank {rank} < {m}"
        )));
    }
    let kernel = if kept.is_empty() { vec![vec![Rational::from_integer(1.into()); m]] } else { mat.kernel() };
    let x = &kernel[0];
    let mut witness: Vec<ScalarExpr> =
        x.iter().zip(&col_scale).map(|(c, g)| ScalarExpr::from_rational(c.clone()).div(g)).collect::<Result<_>>()?;
    let lead = witness.iter().find(|w| !w.is_zero()).cloned().expect("kernel vector is nonzero");
    for w in &mut witness {
        *w = w.div(&lead)?;
    }
    Ok((Independence::Dependent { witness }, rank))
}

pub fn interval_independence(vectors: &[SeqExpr], l: u64, precision: u32) -> (Independence, usize) {
    let rows: Vec<Vec<CertInterval>> =
        (1..=l).map(|k| vectors.iter().map(|v| v.coord(k).enclose(precision)).collect()).collect();
    let rank = interval_rank_lower_bound(&rows);
    let outcome = if rank == vectors.len() { Independence::Independent } else { Independence::Indeterminate };
    (outcome, rank)
}

pub fn independence_check(vectors: &[SeqExpr], l: u64, mode: CheckMode, precision: u32) -> Result<IndependenceReport> {
    if (l as usize) < vectors.len() {
        return Err(Error::InvalidInput(format!("window {l} is shorter than the {} vectors", vectors.len())));
    }
    if mode == CheckMode::Exact {
        match exact_independence(vectors, l) {
            Ok((outcome, rank)) => {
                return Ok(IndependenceReport { outcome, mode_used: CheckMode::Exact, window: l, rank_lower_bound: rank, fallback_reason: None })
            }
            Err(e @ Error::ReductionFailed(_)) => {
                let (outcome, rank) = interval_independence(vectors, l, precision);
                return Ok(IndependenceReport {
                    outcome,
                    mode_used: CheckMode::Interval,
                    window: l,
                    rank_lower_bound: rank,
                    fallback_reason: Some(e.to_string()),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let (outcome, rank) = interval_independence(vectors, l, precision);
    Ok(IndependenceReport { outcome, mode_used: CheckMode::Interval, window: l, rank_lower_bound: rank, fallback_reason: None })
}

/// Σ w_i v_i over the first L coordinates, exactly.
pub fn combination_section(vectors: &[SeqExpr], weights: &[ScalarExpr], l: u64) -> Vec<FormalSum> {
    (1..=l)
        .map(|k| {
            vectors.iter().zip(weights).fold(FormalSum::zero(), |acc, (v, w)| acc.add(&v.coord(k).scale(w)))
        })
        .collect()
}
