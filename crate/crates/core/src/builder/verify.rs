use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::collapse::{distance_row, sign_check, strictly_decreasing, CollapseReport, COLLAPSE_SCHEMA};
use super::engine::{cauchy_pairs, corrections_for, eta_lo, remainder_for, reserve_positions, BuildConfig};
use super::oracle::check_contract;
use super::steps::{abs_enclose, lambda_bound, min_nonzero_after};
use super::trace::{assemble, eps, ConstructionTrace, Step, TraceKind, TRACE_SCHEMA};
use crate::constructions::{independence_check, CheckMode, Independence};
use crate::exact::rational::int;
use crate::exact::{certified_sign, pow_enclose, CertInterval, Dyadic, Rational, ScalarExpr, Sign};
use crate::norms::p_norm;
use crate::seq::{truncate, SeqExpr};
use crate::zeros::{common_zeros, staircase_reduce};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Indeterminate,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub invariant: String,
    pub status: Status,
    pub detail: String,
}

/// Collects findings for one invariant; the worst status wins.
struct Check {
    name: &'static str,
    status: Status,
    notes: Vec<String>,
    checked: usize,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, status: Status::Pass, notes: vec![], checked: 0 }
    }

    fn ok(&mut self) {
        self.checked += 1;
    }

    fn fail(&mut self, note: String) {
        self.checked += 1;
        self.status = self.status.max(Status::Fail);
        self.notes.push(note);
    }

    fn unsure(&mut self, note: String) {
        self.checked += 1;
        self.status = self.status.max(Status::Indeterminate);
        self.notes.push(note);
    }

    fn expect(&mut self, cond: bool, note: impl FnOnce() -> String) {
        if cond {
            self.ok()
        } else {
            self.fail(note())
        }
    }

    fn done(self) -> Verdict {
        let detail = if self.notes.is_empty() {
            format!("{} checks", self.checked)
        } else {
            let mut shown: Vec<String> = self.notes.iter().take(3).cloned().collect();
            if self.notes.len() > 3 {
                shown.push(format!("and {} more", self.notes.len() - 3));
            }
            shown.join("; ")
        };
        Verdict { invariant: self.name.into(), status: self.status, detail }
    }
}

pub fn overall(verdicts: &[Verdict]) -> Status {
    verdicts.iter().map(|v| v.status).max().unwrap_or(Status::Pass)
}

fn single(name: &'static str, note: String) -> Vec<Verdict> {
    let mut c = Check::new(name);
    c.fail(note);
    vec![c.done()]
}

fn lambda_interval(l: &ScalarExpr, precision: u32) -> CertInterval {
    l.enclose(precision).abs()
}

fn eta_enclosure(t: &ConstructionTrace, k: u64) -> Option<CertInterval> {
    let e = eps(t.eps_base, k);
    let q = t.p.q().q;
    if q.is_one() {
        return Some(CertInterval::from_rational(&e, t.precision));
    }
    pow_enclose(&e, &q.recip(), t.precision).ok()
}

fn is_pow2(r: &Rational) -> bool {
    let is_p2 = |n: &num_bigint::BigInt| n.is_positive() && (n & (n - 1u8)).is_zero();
    r.is_positive() && ((r.denom().is_one() && is_p2(r.numer())) || (r.numer().is_one() && is_p2(r.denom())))
}

/// Re-derives every certificate of a trace from its recorded choices.
pub fn verify_trace(t: &ConstructionTrace) -> Vec<Verdict> {
    if t.schema != TRACE_SCHEMA {
        return single("schedule-monotone", format!("unknown schema {}", t.schema));
    }
    if t.steps.is_empty() || t.outputs.len() != t.steps.len() {
        return single("schedule-monotone", "steps and outputs disagree in length".into());
    }
    if (t.kind == TraceKind::Extension) != t.extension.is_some() {
        return single("staircase-pivots", "extension data does not match the trace kind".into());
    }
    let cfg = BuildConfig { p: t.p.clone(), window: t.window, precision: t.precision, eps_base: t.eps_base };
    let (l, prec) = (t.window, t.precision);
    let reserved: BTreeSet<u64> = t.reserved.iter().copied().collect();
    let v_hats: Vec<Arc<SeqExpr>> = t.steps.iter().map(|s| Arc::new(s.v_hat())).collect();
    let mut out = Vec::new();

    let mut epsc = Check::new("epsilon-schedule");
    for (i, s) in t.steps.iter().enumerate() {
        epsc.expect(s.k == i as u64 + 1 && s.eps == eps(t.eps_base, s.k), || format!("step {} has ε = {}", i + 1, s.eps));
    }
    for (i, o) in t.outputs.iter().enumerate() {
        epsc.expect(o.k == i as u64 + 1, || format!("output {} is labelled {}", i + 1, o.k));
    }
    out.push(epsc.done());

    let mut sched = Check::new("schedule-monotone");
    let first_m = match &t.extension {
        Some(ext) => ext.staircase.last_pivot() + 1,
        None => t.steps[0].m,
    };
    sched.expect(t.steps[0].m == first_m && t.steps[0].m >= 1, || format!("m_1 = {} expected {}", t.steps[0].m, first_m));
    for w in t.steps.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let mut min_m = a.m + a.r + 1;
        if t.kind == TraceKind::Extension && a.k >= 2 {
            if let Some(&n) = t.reserved.get(a.k as usize - 1) {
                min_m = min_m.max(n + 1);
            }
        }
        sched.expect(b.min_m == min_m && b.m >= min_m, || format!("m_{} = {} below {}", b.k, b.m, min_m));
    }
    for s in &t.steps {
        match min_nonzero_after(&s.raw, s.m, l, prec) {
            Ok(r) => sched.expect(r == s.r, || format!("r_{} recomputes to {r}, recorded {}", s.k, s.r)),
            Err(e) => sched.unsure(format!("r_{}: {e}", s.k)),
        }
    }
    out.push(sched.done());

    let mut oracle = Check::new("oracle-contract");
    let first_depth = if t.kind == TraceKind::Extension { t.steps[0].m } else { t.steps[0].m.saturating_sub(1) };
    let contract = |c: &mut Check, v: &SeqExpr, r: u64, what: String| match check_contract(v, r, &reserved, l, prec) {
        Ok(()) => c.ok(),
        Err(e) => c.fail(format!("{what}: {e}")),
    };
    contract(&mut oracle, &t.steps[0].raw, first_depth, "v_1".into());
    for s in &t.steps[1..] {
        match &s.construction {
            Some(c) => {
                contract(&mut oracle, &c.z, s.m, format!("z for v_{}", s.k));
                contract(&mut oracle, &c.u, s.pivot().saturating_sub(1), format!("u for v_{}", s.k));
            }
            None => oracle.fail(format!("v_{} has no recorded construction", s.k)),
        }
    }
    out.push(oracle.done());

    let mut vcons = Check::new("v-construction");
    for s in &t.steps[1..] {
        if let Some(c) = &s.construction {
            let expected = SeqExpr::LinearCombo(vec![
                (c.lambda.clone(), Arc::new(c.z.clone())),
                (ScalarExpr::from_int(-1), Arc::new(c.u.clone())),
            ]);
            vcons.expect(expected == s.raw, || format!("v_{} is not λ z − u", s.k));
        }
    }
    if t.steps[0].construction.is_some() {
        vcons.fail("v_1 carries a construction".into());
    }
    out.push(vcons.done());

    let mut norm = Check::new("normalization");
    for (s, v) in t.steps.iter().zip(&v_hats) {
        if !is_pow2(&s.nu) {
            norm.fail(format!("ν_{} = {} is not a power of two", s.k, s.nu));
            continue;
        }
        match p_norm(v, &t.p, l, prec) {
            Ok(n) if n.hi_rational() <= Rational::one() => norm.ok(),
            Ok(n) if n.lo_rational() > Rational::one() => norm.fail(format!("‖v_{}‖ = {n}", s.k)),
            Ok(n) => norm.unsure(format!("‖v_{}‖ = {n}", s.k)),
            Err(e) => norm.unsure(format!("v_{}: {e}", s.k)),
        }
    }
    out.push(norm.done());

    let mut lam = Check::new("lambda-inequality");
    let mut dom = Check::new("bullet-domination");
    let mut bullet = Check::new("bullet-nonzero");
    for (i, s) in t.steps.iter().enumerate() {
        let idx = s.pivot();
        if idx > l {
            bullet.fail(format!("pivot of v_{} lies outside the window", s.k));
            continue;
        }
        let zero_before = (1..idx).all(|j| v_hats[i].coord(j).is_zero());
        let sign = certified_sign(&v_hats[i].coord(idx), prec);
        if !zero_before {
            bullet.fail(format!("v_{} is nonzero before index {idx}", s.k));
        } else if sign == Sign::ContainsZero {
            bullet.unsure(format!("v_{} at {idx} not certified nonzero", s.k));
        } else {
            bullet.ok();
        }
        let Some(c) = &s.construction else { continue };
        let v_sum = v_hats[..i].iter().fold(CertInterval::zero(prec), |acc, v| acc.add(&abs_enclose(&v.coord(idx), prec)));
        let (Ok(eta), Some(eta_i)) = (eta_lo(&t.p, t.eps_base, s.k, prec), eta_enclosure(t, s.k)) else {
            lam.unsure(format!("ε_{} root not enclosed", s.k));
            continue;
        };
        let ui = abs_enclose(&c.u.coord(idx), prec);
        let zi = abs_enclose(&c.z.coord(idx), prec);
        match lambda_bound(&ui, &zi, &v_sum, &eta) {
            Ok(b) => {
                let li = lambda_interval(&c.lambda, prec);
                if li.lo() > b.hi() {
                    lam.ok()
                } else if li.hi() <= b.lo() {
                    lam.fail(format!("|λ| = {} does not exceed {}", c.lambda, b))
                } else {
                    lam.unsure(format!("|λ| = {} against {}", c.lambda, b))
                }
            }
            Err(e) => lam.unsure(format!("v_{}: {e}", s.k)),
        }
        let target = abs_enclose(&v_hats[i].coord(idx), prec);
        let rhs = eta_i.mul(&target);
        if v_sum.hi() <= rhs.lo() {
            dom.ok()
        } else if v_sum.lo() > rhs.hi() {
            dom.fail(format!("Σ|v_i| at {idx} exceeds η|v_{}|", s.k))
        } else {
            dom.unsure(format!("domination at {idx} not certified"))
        }
    }
    out.push(lam.done());
    out.push(bullet.done());
    out.push(dom.done());

    let mut disj = Check::new("support-disjointness");
    let mut cauchy = Check::new("cauchy-chain");
    let slack = Dyadic::pow2(-((prec / 2) as i64)).to_rational();
    let mut ys = Vec::with_capacity(t.outputs.len());
    for (k, o) in (1..).zip(&t.outputs) {
        let cs = match corrections_for(&t.steps, &v_hats, k) {
            Ok(cs) => cs,
            Err(e) => {
                disj.fail(format!("y_{k}: {e}"));
                continue;
            }
        };
        if cs != o.corrections {
            disj.fail(format!("y_{k}: recorded corrections differ"));
            continue;
        }
        let y = assemble(&v_hats, k, &cs);
        if truncate(&y, l, &t.p, prec) != o.section {
            disj.fail(format!("y_{k}: recorded section differs"));
        }
        for (i, s) in (1..).zip(&t.steps) {
            let idx = s.pivot();
            if idx > l {
                continue;
            }
            let c = y.coord(idx);
            if i == k {
                let same = c == v_hats[k - 1].coord(idx);
                if !same {
                    disj.fail(format!("y_{k} at {idx} differs from v_{k}"));
                } else if certified_sign(&c, prec) == Sign::ContainsZero {
                    disj.unsure(format!("y_{k} at {idx} not certified nonzero"));
                } else {
                    disj.ok();
                }
            } else {
                disj.expect(c.is_zero(), || format!("y_{k} at m_{i} + r_{i} = {idx} is not structurally zero"));
            }
        }
        match cauchy_pairs(&v_hats, k, &cs, &cfg) {
            Ok(pairs) => {
                if pairs != o.cauchy {
                    cauchy.fail(format!("y_{k}: recorded Cauchy pairs differ"));
                }
                for pr in &pairs {
                    let allowed = &pr.bound + &slack;
                    if pr.norm.hi_rational() <= allowed {
                        cauchy.ok()
                    } else if pr.norm.lo_rational() > allowed {
                        cauchy.fail(format!("y_{k}: ‖x_{} − x_{}‖ = {} exceeds {}", pr.m, pr.r, pr.norm, pr.bound))
                    } else {
                        cauchy.unsure(format!("y_{k}: pair ({}, {}) not certified", pr.r, pr.m))
                    }
                }
            }
            Err(e) => cauchy.unsure(format!("y_{k}: {e}")),
        }
        let rem = remainder_for(&y, &t.steps, t.eps_base);
        cauchy.expect(rem == o.remainder, || format!("y_{k}: remainder {} recomputes to {rem}", o.remainder));
        ys.push(y);
    }

    let mut family = ys.clone();
    let mut czc = Check::new("common-zero-avoidance");
    if let Some(ext) = &t.extension {
        let mut stair = Check::new("staircase-pivots");
        match staircase_reduce(&ext.inputs, l, prec) {
            Ok(b) => stair.expect(b == ext.staircase, || "recorded staircase differs from recomputation".into()),
            Err(e) => stair.fail(format!("staircase: {e}")),
        }
        stair.expect(ext.staircase.pivots.windows(2).all(|w| w[0] < w[1]), || "pivots are not increasing".into());
        let cz = common_zeros(&ext.inputs, l);
        stair.expect(cz.positions == ext.common_zeros, || "recorded common zeros differ".into());
        let s_e = ext.inputs.iter().map(|v| v.support_end().unwrap_or(l)).max().unwrap_or(l).min(l);
        stair.expect(reserve_positions(&cz.positions, s_e) == t.reserved, || "reserved positions differ from policy".into());
        out.push(stair.done());

        family = ext.staircase.vectors.clone();
        family.extend(ys.iter().cloned());
        let pivots: Vec<u64> = ext.staircase.pivots.iter().copied().chain(t.steps.iter().map(Step::pivot)).collect();
        for (a, w) in family.iter().enumerate() {
            if pivots[a] <= l {
                let s = certified_sign(&w.coord(pivots[a]), prec);
                if s == Sign::ContainsZero {
                    disj.unsure(format!("w_{} at its pivot not certified nonzero", a + 1));
                } else {
                    disj.ok();
                }
            }
            for &pb in &pivots[..a] {
                disj.expect(w.coord(pb).is_zero(), || format!("w_{} at earlier pivot {pb} is not structurally zero", a + 1));
            }
        }
        let known: BTreeSet<u64> = ext.common_zeros.iter().copied().collect();
        for &n in &t.reserved {
            czc.expect(known.contains(&n), || format!("reserved {n} is not a common zero of E"));
        }
    }
    for (k, y) in (1..).zip(&ys) {
        for &n in t.reserved.iter().filter(|&&n| n <= l) {
            czc.expect(y.coord(n).is_zero(), || format!("y_{k} at n_i = {n} is not structurally zero"));
        }
    }
    out.push(disj.done());
    out.push(cauchy.done());
    if t.extension.is_some() {
        out.push(czc.done());
    }

    let mut ind = Check::new("independence");
    match independence_check(&family, l, CheckMode::Exact, prec) {
        Ok(r) => match r.outcome {
            Independence::Independent => ind.ok(),
            Independence::Dependent { .. } => ind.fail("outputs are dependent on the window".into()),
            Independence::Indeterminate => ind.unsure("independence not certified".into()),
        },
        Err(e) => ind.unsure(format!("{e}")),
    }
    out.push(ind.done());
    out
}

fn merge(into: &mut Vec<Verdict>, more: Vec<Verdict>, tag: &str) {
    for v in more {
        match into.iter_mut().find(|x| x.invariant == v.invariant) {
            Some(x) => {
                if v.status > x.status {
                    x.status = v.status;
                    x.detail = format!("{tag}: {}", v.detail);
                }
            }
            None => into.push(Verdict { detail: if v.status == Status::Pass { v.detail } else { format!("{tag}: {}", v.detail) }, ..v }),
        }
    }
}

/// Replays every per-n trace, then the distance bounds and their ordering.
pub fn verify_collapse(r: &CollapseReport) -> Vec<Verdict> {
    if r.schema != COLLAPSE_SCHEMA {
        return single("collapse-bound", format!("unknown schema {}", r.schema));
    }
    let mut out = Vec::new();
    let mut bound = Check::new("collapse-bound");
    let mut mono = Check::new("collapse-monotonicity");
    let first_raw = r.rows.first().map(|row| row.trace.steps.first().map(|s| s.raw.clone()));
    for (i, row) in r.rows.iter().enumerate() {
        let t = &row.trace;
        merge(&mut out, verify_trace(t), &format!("n = {}", row.n));
        mono.expect(row.n == i as u64 + 1, || format!("row {} has n = {}", i + 1, row.n));
        bound.expect(t.kind == TraceKind::Collapse && t.eps_base == row.n + 1, || format!("n = {}: schedule base {}", row.n, t.eps_base));
        bound.expect(
            t.steps.first().map(|s| s.m) == Some(r.m11) && first_raw == Some(t.steps.first().map(|s| s.raw.clone())),
            || format!("n = {}: does not start from v_(1,1)", row.n),
        );
        let q = t.p.q().q;
        match distance_row(row.n, t.clone(), &q, t.precision) {
            Ok(again) => bound.expect(&again == row, || format!("n = {}: recorded bounds differ from recomputation", row.n)),
            Err(e) => bound.unsure(format!("n = {}: {e}", row.n)),
        }
        bound.expect(row.certified_upper <= row.schedule_tail, || format!("n = {}: computed {} above {}", row.n, row.certified_upper, row.schedule_tail));
        bound.expect(row.distance_bound.hi_rational() <= row.schedule_sum.lo_rational(), || format!("n = {}: bound above the closed form", row.n));
        bound.expect(row.schedule_tail == int(1) / int((row.n * (row.n + 1)) as i64), || format!("n = {}: schedule tail", row.n));
    }
    if let Some(row) = r.rows.first() {
        match sign_check(&row.trace.p.q().q, row.trace.precision) {
            Ok(s) => bound.expect(s == r.sign_check && s.rejected_value_at_two.sign() == Sign::Negative, || "sign check differs".into()),
            Err(e) => bound.unsure(format!("sign check: {e}")),
        }
    }
    let uppers: Vec<Rational> = r.rows.iter().map(|row| row.distance_bound.hi_rational()).collect();
    mono.expect(strictly_decreasing(&uppers), || "upper ends are not strictly decreasing".into());
    out.push(bound.done());
    out.push(mono.done());
    out
}
