use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::oracle::SubspaceOracle;
use crate::exact::rational::{int, pow_int};
use crate::exact::{CertInterval, FormalSum, Rational, ScalarExpr};
use crate::norms::PExponent;
use crate::seq::{SeqExpr, TruncatedVector};
use crate::zeros::StaircaseBasis;

pub const TRACE_SCHEMA: &str = "seqspace-trace/1";

/// How v_k was produced from the oracle: v_k = λ z − u, with z ∈ W_{m_k}
/// and u ∈ W_{m_k + r_k − 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Construction {
    pub z: SeqExpr,
    pub u: SeqExpr,
    pub lambda: ScalarExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Step {
    pub k: u64,
    pub m: u64,
    pub r: u64,
    #[serde(with = "crate::exact::rational::serde_str")]
    pub eps: Rational,
    /// Smallest admissible m_k; m - min_m is the extra gap taken.
    pub min_m: u64,
    pub raw: SeqExpr,
    pub construction: Option<Construction>,
    /// v_k = raw / nu with nu a power of two.
    #[serde(with = "crate::exact::rational::serde_str")]
    pub nu: Rational,
}

impl Step {
    pub fn pivot(&self) -> u64 {
        self.m + self.r
    }

    pub fn v_hat(&self) -> SeqExpr {
        Arc::new(self.raw.clone()).scale(&ScalarExpr::from_rational(self.nu.recip()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CauchyPair {
    pub r: u64,
    pub m: u64,
    pub norm: CertInterval,
    #[serde(with = "crate::exact::rational::serde_str")]
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Output {
    pub k: u64,
    /// c_j with x_{j,k} = x_{j-1,k} − c_j v_{k+j}.
    pub corrections: Vec<FormalSum>,
    pub section: TruncatedVector,
    pub cauchy: Vec<CauchyPair>,
    /// Bound on ‖y_k − x_{J,k}‖ from corrections past the last built vector.
    #[serde(with = "crate::exact::rational::serde_str")]
    pub remainder: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Extension {
    pub inputs: Vec<SeqExpr>,
    pub staircase: StaircaseBasis,
    pub common_zeros: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConstructionTrace {
    pub schema: String,
    pub kind: TraceKind,
    pub p: PExponent,
    pub window: u64,
    pub precision: u32,
    pub oracle: SubspaceOracle,
    /// ε_k = eps_base^{-k}.
    pub eps_base: u64,
    /// Positions every output must vanish on (the n_i).
    pub reserved: Vec<u64>,
    pub steps: Vec<Step>,
    pub outputs: Vec<Output>,
    pub extension: Option<Extension>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TraceKind {
    Family,
    Extension,
    Collapse,
}

pub fn eps(base: u64, k: u64) -> Rational {
    pow_int(&int(base as i64), -(k as i64))
}

/// Σ_{j>J} ε_{k+j} with k + J = last: base^{-last} / (base − 1).
pub fn geometric_tail(base: u64, last: u64) -> Rational {
    eps(base, last) / int(base as i64 - 1)
}

/// y_k = v_k − Σ_j c_j v_{k+j}.
pub fn assemble(v_hats: &[Arc<SeqExpr>], k: usize, corrections: &[FormalSum]) -> SeqExpr {
    let mut terms = vec![(ScalarExpr::one(), Arc::clone(&v_hats[k - 1]))];
    for (j, c) in corrections.iter().enumerate() {
        for t in c.terms() {
            terms.push((t.neg(), Arc::clone(&v_hats[k + j])));
        }
    }
    if terms.len() == 1 {
        return (*v_hats[k - 1]).clone();
    }
    SeqExpr::LinearCombo(terms)
}

/// x_{m,k} − x_{r,k} = −Σ_{j=r+1}^{m} c_j v_{k+j}.
pub fn correction_difference(v_hats: &[Arc<SeqExpr>], k: usize, corrections: &[FormalSum], r: usize, m: usize) -> SeqExpr {
    let mut terms = Vec::new();
    for j in r + 1..=m {
        for t in corrections[j - 1].terms() {
            terms.push((t.neg(), Arc::clone(&v_hats[k + j - 1])));
        }
    }
    if terms.is_empty() {
        SeqExpr::zero()
    } else {
        SeqExpr::LinearCombo(terms)
    }
}
