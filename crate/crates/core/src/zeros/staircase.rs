use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::{independence_check, CheckMode, Independence};
use crate::error::{Error, Result};
use crate::exact::{certified_sign, FormalSum, ScalarExpr, Sign};
use crate::seq::SeqExpr;

/// Echelon form of a finite basis: vector k vanishes structurally below
/// pivots[k] and is certified nonzero there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StaircaseBasis {
    pub window: u64,
    pub vectors: Vec<SeqExpr>,
    pub pivots: Vec<u64>,
    /// Input slot each output was seeded from.
    pub sources: Vec<usize>,
    /// combination[k][i] is the weight of input i in output k.
    pub combination: Vec<Vec<FormalSum>>,
}

impl StaircaseBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn last_pivot(&self) -> u64 {
        self.pivots.last().copied().unwrap_or(0)
    }
}

/// Combination Σ_i w_i inputs_i as a flat `LinearCombo`.
pub fn flat_combination(inputs: &[Arc<SeqExpr>], weights: &[FormalSum]) -> SeqExpr {
    let mut terms = Vec::new();
    for (w, v) in weights.iter().zip(inputs) {
        for t in w.terms() {
            terms.push((t, Arc::clone(v)));
        }
    }
    if terms.is_empty() {
        return SeqExpr::zero();
    }
    if let [(w, v)] = terms.as_slice() {
        if w == &ScalarExpr::one() {
            return (**v).clone();
        }
    }
    SeqExpr::LinearCombo(terms)
}

fn leading(section: &[FormalSum]) -> Option<u64> {
    section.iter().position(|c| !c.is_zero()).map(|i| i as u64 + 1)
}

pub fn staircase_reduce(basis: &[SeqExpr], l: u64, precision: u32) -> Result<StaircaseBasis> {
    let n = basis.len();
    if n == 0 {
        return Ok(StaircaseBasis { window: l, vectors: vec![], pivots: vec![], sources: vec![], combination: vec![] });
    }
    if l as usize >= n {
        let report = independence_check(basis, l, CheckMode::Exact, precision)?;
        if matches!(report.outcome, Independence::Dependent { .. }) {
            return Err(Error::DependentInput);
        }
    }
    let inputs: Vec<Arc<SeqExpr>> = basis.iter().cloned().map(Arc::new).collect();
    let mut work: Vec<Vec<FormalSum>> = basis.iter().map(|v| v.coords(1, l)).collect();
    let mut ledger: Vec<Vec<FormalSum>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { FormalSum::from_scalar(&ScalarExpr::one()) } else { FormalSum::zero() }).collect())
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut out = StaircaseBasis { window: l, vectors: vec![], pivots: vec![], sources: vec![], combination: vec![] };

    while !remaining.is_empty() {
        let mut best: Option<(u64, usize)> = None;
        for &j in &remaining {
            let lead = leading(&work[j]).ok_or(Error::DependentInput)?;
            if best.is_none_or(|(b, _)| lead < b) {
                best = Some((lead, j));
            }
        }
        let (s, piv) = best.expect("remaining is nonempty");
        let entry = &work[piv][(s - 1) as usize];
        if certified_sign(entry, precision) == Sign::ContainsZero {
            return Err(Error::IndeterminateLeading { vector: piv, index: s });
        }
        // Divide by a monomial pivot; otherwise cross-multiply, which rescales
        // the eliminated vector by the nonzero pivot value.
        let (row_scale, inv) = match entry.as_monomial() {
            Some(m) => (None, FormalSum::from_scalar(&m.inv()?)),
            None => (Some(entry.clone()), FormalSum::from_scalar(&ScalarExpr::one())),
        };
        remaining.retain(|&j| j != piv);
        let pivot_row = work[piv].clone();
        let pivot_ledger = ledger[piv].clone();
        for &j in &remaining {
            let ratio = work[j][(s - 1) as usize].mul(&inv);
            if ratio.is_zero() {
                continue;
            }
            let rescale = |x: &FormalSum| match &row_scale {
                Some(r) => x.mul(r),
                None => x.clone(),
            };
            for (x, y) in work[j].iter_mut().zip(&pivot_row) {
                *x = rescale(x).sub(&y.mul(&ratio));
            }
            for (x, y) in ledger[j].iter_mut().zip(&pivot_ledger) {
                *x = rescale(x).sub(&y.mul(&ratio));
            }
        }
        out.vectors.push(flat_combination(&inputs, &ledger[piv]));
        out.pivots.push(s);
        out.sources.push(piv);
        out.combination.push(ledger[piv].clone());
    }
    Ok(out)
}
