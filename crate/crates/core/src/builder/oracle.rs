use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::rat;
use crate::exact::{certified_sign, ScalarExpr, Sign};
use crate::linalg::RatMatrix;
use crate::seq::SeqExpr;

/// Supplier of nonzero vectors in W_r = {x : x_1 = … = x_r = 0}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SubspaceOracle {
    /// e_t for the first t > r outside the reserved set.
    TailShift,
    /// coordinate t + j equals ratio^j from the first admissible t > r on,
    /// with reserved positions inside the window cancelled exactly.
    GeometricTail { ratio: ScalarExpr },
    /// A member of the span of finitely many generators, found by exact
    /// elimination on the constrained coordinates.
    Span { generators: Vec<SeqExpr> },
}

impl SubspaceOracle {
    pub fn geometric_half() -> Self {
        SubspaceOracle::GeometricTail { ratio: ScalarExpr::from_rational(rat(1, 2)) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SubspaceOracle::TailShift => "tailshift",
            SubspaceOracle::GeometricTail { .. } => "geometric",
            SubspaceOracle::Span { .. } => "span",
        }
    }

    /// A nonzero vector of W_r that is structurally zero on `reserved`
    /// within the window and certified nonzero somewhere in (r, L].
    pub fn vector_in(&self, r: u64, reserved: &BTreeSet<u64>, l: u64) -> Result<SeqExpr> {
        let first_free = || {
            let t = (r + 1..=l).find(|t| !reserved.contains(t));
            t.ok_or(Error::WindowExhausted { window: l, needed: l + 1 })
        };
        let v = match self {
            SubspaceOracle::TailShift => SeqExpr::unit(first_free()?),
            SubspaceOracle::GeometricTail { ratio } => {
                let t = first_free()?;
                let tail = Arc::new(SeqExpr::power_tail(ScalarExpr::one(), ratio.clone(), t)?);
                let hits: Vec<(u64, ScalarExpr)> = reserved
                    .range(t + 1..=l)
                    .map(|&k| Ok((k, ratio.powi((k - t) as i64)?)))
                    .collect::<Result<_>>()?;
                if hits.is_empty() {
                    (*tail).clone()
                } else {
                    SeqExpr::lin_combo(vec![
                        (ScalarExpr::one(), tail),
                        (ScalarExpr::from_int(-1), Arc::new(SeqExpr::finite(hits)?)),
                    ])?
                }
            }
            SubspaceOracle::Span { generators } => span_member(generators, r, reserved, l)?,
        };
        check_contract(&v, r, reserved, l, 64).map_err(Error::OracleFailure)?;
        Ok(v)
    }
}

fn span_member(generators: &[SeqExpr], r: u64, reserved: &BTreeSet<u64>, l: u64) -> Result<SeqExpr> {
    let positions: Vec<u64> = (1..=r.min(l)).chain(reserved.range(r + 1..=l).copied()).collect();
    let mut rows = Vec::with_capacity(positions.len());
    for &k in &positions {
        let mut row = Vec::with_capacity(generators.len());
        for g in generators {
            row.push(g.coord(k).as_rational().ok_or_else(|| {
                Error::OracleFailure(format!("generator coordinate {k} is not rational"))
            })?);
        }
        rows.push(row);
    }
    let kernel = if rows.is_empty() {
        (0..generators.len())
            .map(|i| (0..generators.len()).map(|j| rat(i64::from(i == j), 1)).collect())
            .collect()
    } else {
        RatMatrix::from_rows(rows).kernel()
    };
    for c in kernel {
        let terms: Vec<(ScalarExpr, Arc<SeqExpr>)> = c
            .iter()
            .zip(generators)
            .filter(|(w, _)| !num_traits::Zero::is_zero(*w))
            .map(|(w, g)| (ScalarExpr::from_rational(w.clone()), Arc::new(g.clone())))
            .collect();
        let v = SeqExpr::lin_combo(terms)?;
        if check_contract(&v, r, reserved, l, 64).is_ok() {
            return Ok(v);
        }
    }
    Err(Error::OracleFailure(format!("span has no nonzero member of W_{r} inside window {l}")))
}

/// Membership in W_r, zeros on reserved positions, and a certified nonzero
/// coordinate inside the window.
pub fn check_contract(v: &SeqExpr, r: u64, reserved: &BTreeSet<u64>, l: u64, precision: u32) -> std::result::Result<(), String> {
    if let Some(k) = (1..=r.min(l)).find(|&k| !v.coord(k).is_zero()) {
        return Err(format!("coordinate {k} <= {r} is not structurally zero"));
    }
    if let Some(k) = reserved.range(..=l).find(|&&k| !v.coord(k).is_zero()) {
        return Err(format!("reserved coordinate {k} is not structurally zero"));
    }
    let nonzero = (r + 1..=l).any(|k| {
        let c = v.coord(k);
        !c.is_zero() && certified_sign(&c, precision) != Sign::ContainsZero
    });
    if nonzero {
        Ok(())
    } else {
        Err(format!("no certified nonzero coordinate in ({r}, {l}]"))
    }
}
