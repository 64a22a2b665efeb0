use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::One;

use super::oracle::SubspaceOracle;
use super::steps::{abs_enclose, choose_lambda_multi, dominated, min_nonzero_after, normalizer};
use super::trace::{
    assemble, correction_difference, eps, geometric_tail, CauchyPair, Construction, ConstructionTrace, Extension, Output, Step,
    TraceKind, TRACE_SCHEMA,
};
use crate::error::{Error, Result};
use crate::exact::rational::int;
use crate::exact::{pow_enclose, CertInterval, FormalSum, Rational, ScalarExpr, MIN_PRECISION};
use crate::norms::{p_norm, PExponent};
use crate::seq::{truncate, SeqExpr};
use crate::zeros::{common_zeros, staircase_reduce};

const MAX_DOUBLINGS: usize = 6;

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub p: PExponent,
    pub window: u64,
    pub precision: u32,
    /// ε_k = eps_base^{-k}.
    pub eps_base: u64,
}

impl BuildConfig {
    pub fn new(p: PExponent, window: u64, precision: u32) -> Self {
        BuildConfig { p, window, precision, eps_base: 2 }
    }

    fn validate(&self) -> Result<()> {
        if self.precision < MIN_PRECISION {
            return Err(Error::PrecisionTooLow { got: self.precision, min: MIN_PRECISION });
        }
        if self.eps_base < 2 {
            return Err(Error::InvalidInput("epsilon base must be at least 2".into()));
        }
        if self.window == 0 {
            return Err(Error::InvalidInput("window must be positive".into()));
        }
        Ok(())
    }
}

/// Lower end of ε_k^{1/q}, the domination ratio demanded at pivot k.
pub fn eta_lo(p: &PExponent, base: u64, k: u64, precision: u32) -> Result<Rational> {
    let e = eps(base, k);
    let q = p.q().q;
    if q.is_one() {
        return Ok(e);
    }
    Ok(pow_enclose(&e, &q.recip(), precision)?.lo_rational())
}

pub(crate) struct Grower<'a> {
    oracle: &'a SubspaceOracle,
    cfg: &'a BuildConfig,
    reserved_set: BTreeSet<u64>,
    /// n_i, sorted; only enforced on the schedule when `avoid` is set.
    reserved: Vec<u64>,
    avoid: bool,
    pub steps: Vec<Step>,
    pub v_hats: Vec<Arc<SeqExpr>>,
}

impl<'a> Grower<'a> {
    pub fn new(oracle: &'a SubspaceOracle, cfg: &'a BuildConfig, reserved: Vec<u64>, avoid: bool) -> Self {
        Grower { oracle, cfg, reserved_set: reserved.iter().copied().collect(), reserved, avoid, steps: vec![], v_hats: vec![] }
    }

    fn push(&mut self, step: Step) {
        self.v_hats.push(Arc::new(step.v_hat()));
        self.steps.push(step);
    }

    pub fn first(&mut self, m: u64, raw: SeqExpr) -> Result<()> {
        let c = self.cfg;
        let r = min_nonzero_after(&raw, m, c.window, c.precision)?;
        let nu = normalizer(&raw, &c.p, c.window, c.precision)?;
        self.push(Step { k: 1, m, r, eps: eps(c.eps_base, 1), min_m: m, raw, construction: None, nu });
        Ok(())
    }

    /// Appends v_{k+1} = (λ z − u)/ν.
    pub fn grow(&mut self) -> Result<()> {
        let c = self.cfg;
        let l = c.window;
        let last = self.steps.last().expect("first vector is set");
        let k = last.k;
        let mut m_min = last.m + last.r + 1;
        if self.avoid && k >= 2 {
            if let Some(&n) = self.reserved.get(k as usize - 1) {
                m_min = m_min.max(n + 1);
            }
        }
        let eta = eta_lo(&c.p, c.eps_base, k + 1, c.precision)?;
        for m in m_min..=l {
            let z = self.oracle.vector_in(m, &self.reserved_set, l)?;
            let r = min_nonzero_after(&z, m, l, c.precision)?;
            let idx = m + r;
            let u = self.oracle.vector_in(idx - 1, &self.reserved_set, l)?;
            let v_sum = self.v_hats.iter().fold(CertInterval::zero(c.precision), |acc, v| acc.add(&abs_enclose(&v.coord(idx), c.precision)));
            let vs: Vec<SeqExpr> = self.v_hats.iter().map(|v| (**v).clone()).collect();
            let lambda0 = choose_lambda_multi(&u, &z, &vs, &eta, idx, c.precision)?;
            let mut lam = lambda0.as_rational().cloned().expect("power of two");
            let (za, ua) = (Arc::new(z), Arc::new(u));
            for _ in 0..=MAX_DOUBLINGS {
                let lambda = ScalarExpr::from_rational(lam.clone());
                let raw = SeqExpr::LinearCombo(vec![(lambda.clone(), Arc::clone(&za)), (ScalarExpr::from_int(-1), Arc::clone(&ua))]);
                if min_nonzero_after(&raw, m, l, c.precision)? != r {
                    return Err(Error::IndeterminateLeading { vector: k as usize, index: idx });
                }
                let nu = normalizer(&raw, &c.p, l, c.precision)?;
                let target = abs_enclose(&raw.coord(idx), c.precision).mul(&CertInterval::from_rational(&nu.recip(), c.precision));
                if dominated(&v_sum, &eta, &target) {
                    let construction = Construction { z: (*za).clone(), u: (*ua).clone(), lambda };
                    self.push(Step { k: k + 1, m, r, eps: eps(c.eps_base, k + 1), min_m: m_min, raw, construction: Some(construction), nu });
                    return Ok(());
                }
                lam *= int(2);
            }
        }
        Err(Error::WindowExhausted { window: l, needed: l + 1 })
    }

    pub fn finish(&self) -> Result<Vec<Output>> {
        build_outputs(&self.steps, &self.v_hats, self.cfg)
    }
}

/// c_j = x_{j-1,k}[idx_{k+j}] / v_{k+j}[idx_{k+j}] for j = 1..K−k.
pub fn corrections_for(steps: &[Step], v_hats: &[Arc<SeqExpr>], k: usize) -> Result<Vec<FormalSum>> {
    let mut cs: Vec<FormalSum> = Vec::new();
    for j in 1..=steps.len() - k {
        let idx = steps[k + j - 1].pivot();
        let mut num = v_hats[k - 1].coord(idx);
        for (i, ci) in cs.iter().enumerate() {
            num = num.sub(&v_hats[k + i].coord(idx).mul(ci));
        }
        let den = v_hats[k + j - 1].coord(idx).as_monomial().ok_or(Error::NonMonomialPivot(idx))?;
        cs.push(num.scale(&den.inv()?));
    }
    Ok(cs)
}

pub fn cauchy_pairs(v_hats: &[Arc<SeqExpr>], k: usize, cs: &[FormalSum], cfg: &BuildConfig) -> Result<Vec<CauchyPair>> {
    let mut out = Vec::new();
    for m in 1..=cs.len() {
        for r in 0..m {
            let diff = correction_difference(v_hats, k, cs, r, m);
            let norm = p_norm(&diff, &cfg.p, cfg.window, cfg.precision)?;
            out.push(CauchyPair { r: r as u64, m: m as u64, norm, bound: eps(cfg.eps_base, (k + r) as u64) });
        }
    }
    Ok(out)
}

pub fn remainder_for(y: &SeqExpr, steps: &[Step], base: u64) -> Rational {
    let last = steps.last().expect("nonempty schedule");
    match y.support_end() {
        Some(e) if e <= last.pivot() => Rational::from_integer(0.into()),
        _ => geometric_tail(base, last.k),
    }
}

pub fn build_outputs(steps: &[Step], v_hats: &[Arc<SeqExpr>], cfg: &BuildConfig) -> Result<Vec<Output>> {
    let mut outs = Vec::with_capacity(steps.len());
    for k in 1..=steps.len() {
        let corrections = corrections_for(steps, v_hats, k)?;
        let y = assemble(v_hats, k, &corrections);
        let section = truncate(&y, cfg.window, &cfg.p, cfg.precision);
        let cauchy = cauchy_pairs(v_hats, k, &corrections, cfg)?;
        let remainder = remainder_for(&y, steps, cfg.eps_base);
        outs.push(Output { k: k as u64, corrections, section, cauchy, remainder });
    }
    Ok(outs)
}

fn check_count(k_count: usize) -> Result<()> {
    if k_count == 0 {
        return Err(Error::InvalidInput("family size must be positive".into()));
    }
    Ok(())
}

fn trace(kind: TraceKind, oracle: &SubspaceOracle, cfg: &BuildConfig, g: Grower, extension: Option<Extension>) -> Result<ConstructionTrace> {
    let outputs = g.finish()?;
    Ok(ConstructionTrace {
        schema: TRACE_SCHEMA.into(),
        kind,
        p: cfg.p.clone(),
        window: cfg.window,
        precision: cfg.precision,
        oracle: oracle.clone(),
        eps_base: cfg.eps_base,
        reserved: g.reserved.clone(),
        steps: g.steps,
        outputs,
        extension,
    })
}

/// Disjoint-support family y_1..y_K; v_1 is taken from W_{m_1 − 1}.
pub fn build_disjoint_family(oracle: &SubspaceOracle, k_count: usize, cfg: &BuildConfig, m1: u64) -> Result<ConstructionTrace> {
    cfg.validate()?;
    check_count(k_count)?;
    if m1 == 0 {
        return Err(Error::InvalidInput("m_1 must be positive".into()));
    }
    let mut g = Grower::new(oracle, cfg, vec![], false);
    let v1 = oracle.vector_in(m1 - 1, &BTreeSet::new(), cfg.window)?;
    g.first(m1, v1)?;
    while g.steps.len() < k_count {
        g.grow()?;
    }
    trace(TraceKind::Family, oracle, cfg, g, None)
}

/// Common zeros up to the last possibly nonzero index of E, then every
/// second one beyond it so the schedule keeps room inside the window.
pub fn reserve_positions(common: &[u64], support_end: u64) -> Vec<u64> {
    let mut out: Vec<u64> = common.iter().copied().filter(|&c| c <= support_end).collect();
    out.extend(common.iter().copied().filter(|&c| c > support_end).step_by(2));
    out
}

/// Staircase-reduces E, then appends K vectors vanishing on the reserved
/// common zeros, starting from m_1 = s_α + 1.
pub fn extend_to_spaceable(inputs: &[SeqExpr], oracle: &SubspaceOracle, k_count: usize, cfg: &BuildConfig) -> Result<ConstructionTrace> {
    cfg.validate()?;
    check_count(k_count)?;
    if inputs.is_empty() {
        return Err(Error::InvalidInput("E must be nonempty".into()));
    }
    let l = cfg.window;
    let staircase = staircase_reduce(inputs, l, cfg.precision)?;
    let cz = common_zeros(inputs, l);
    if cz.positions.is_empty() {
        return Err(Error::NoCommonZeros(l));
    }
    let s_e = inputs.iter().map(|v| v.support_end().unwrap_or(l)).max().unwrap_or(l).min(l);
    let reserved = reserve_positions(&cz.positions, s_e);
    let m1 = staircase.last_pivot() + 1;
    let mut g = Grower::new(oracle, cfg, reserved, true);
    let v1 = oracle.vector_in(m1, &g.reserved_set, l)?;
    g.first(m1, v1)?;
    while g.steps.len() < k_count {
        g.grow()?;
    }
    let ext = Extension { inputs: inputs.to_vec(), staircase, common_zeros: cz.positions };
    trace(TraceKind::Extension, oracle, cfg, g, Some(ext))
}

pub(crate) fn collapse_trace(oracle: &SubspaceOracle, cfg: &BuildConfig, m1: u64, v1: SeqExpr, k_count: usize) -> Result<ConstructionTrace> {
    cfg.validate()?;
    check_count(k_count)?;
    let mut g = Grower::new(oracle, cfg, vec![], false);
    g.first(m1, v1)?;
    while g.steps.len() < k_count {
        g.grow()?;
    }
    trace(TraceKind::Collapse, oracle, cfg, g, None)
}
