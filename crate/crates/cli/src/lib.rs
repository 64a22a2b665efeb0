//! Report-producing commands behind the `seqspace` binary.

pub mod gen;

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use seqspace_core::builder::{
    build_disjoint_family, collapse_sequence, extend_to_spaceable, overall, verify_collapse, verify_trace, BuildConfig,
    CollapseConfig, CollapseReport, ConstructionTrace, Status, SubspaceOracle, Verdict, COLLAPSE_SCHEMA, TRACE_SCHEMA,
};
use seqspace_core::constructions::{apply_t_linea, independence_check, zero_audit, CheckMode, Independence, UBasisFamily};
use seqspace_core::exact::{parse_rational, Rational, ScalarExpr};
use seqspace_core::norms::{lemma_limit_scan, BoundedSeq, KSchedule, PExponent};
use seqspace_core::seq::SeqExpr;

pub const REPORT_SCHEMA: &str = "seqspace-report/1";
pub const MIN_RUN_PRECISION: u32 = 64;

pub fn tool_version() -> String {
    format!("seqspace {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub p: PExponent,
    pub precision: u32,
    pub window: u64,
    pub seed: u64,
    pub oracle: String,
}

impl RunConfig {
    pub fn new(p: PExponent, precision: u32, window: u64) -> Self {
        RunConfig { p, precision, window, seed: 0, oracle: "tailshift".into() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            bail!("window must be at least 1");
        }
        if self.precision < MIN_RUN_PRECISION {
            bail!("precision must be at least {MIN_RUN_PRECISION} bits");
        }
        Ok(())
    }

    pub fn build_config(&self) -> BuildConfig {
        BuildConfig::new(self.p.clone(), self.window, self.precision)
    }
}

/// `tailshift`, `geometric` (ratio 1/2) or `geometric:<ratio>`.
pub fn parse_oracle(s: &str) -> Result<SubspaceOracle> {
    match s.split_once(':') {
        None if s == "tailshift" => Ok(SubspaceOracle::TailShift),
        None if s == "geometric" => Ok(SubspaceOracle::geometric_half()),
        Some(("geometric", r)) => {
            let ratio = parse_rational(r)?;
            Ok(SubspaceOracle::GeometricTail { ratio: ScalarExpr::from_rational(ratio) })
        }
        _ => bail!("unknown oracle {s:?}; expected tailshift, geometric or geometric:<ratio>"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportEnvelope {
    pub schema: String,
    pub command: String,
    pub config: Value,
    pub certificates: Value,
    pub verdicts: Vec<Verdict>,
    pub tool_version: String,
}

impl ReportEnvelope {
    fn new(command: &str, config: Value, certificates: Value, verdicts: Vec<Verdict>) -> Self {
        ReportEnvelope {
            schema: REPORT_SCHEMA.into(),
            command: command.into(),
            config,
            certificates,
            verdicts,
            tool_version: tool_version(),
        }
    }

    pub fn status(&self) -> Status {
        overall(&self.verdicts)
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.status())
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}\n", self.command, status_word(self.status()));
        for v in &self.verdicts {
            s.push_str(&format!("  {:<24} {:<13} {}\n", v.invariant, status_word(v.status), v.detail));
        }
        s
    }
}

pub fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Indeterminate => "indeterminate",
    }
}

pub fn exit_code(s: Status) -> i32 {
    match s {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Indeterminate => 2,
    }
}

fn verdict(invariant: &str, status: Status, detail: String) -> Verdict {
    Verdict { invariant: invariant.into(), status, detail }
}

fn config_echo(cfg: &RunConfig, extra: Value) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let (Some(m), Value::Object(e)) = (v.as_object_mut(), extra) {
        m.extend(e);
    }
    v
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("payload serializes")
}

pub fn cmd_unorm(cfg: &RunConfig, n_from: u64, n_to: u64) -> Result<ReportEnvelope> {
    cfg.validate()?;
    if n_from < 2 || n_to < n_from {
        bail!("n range must satisfy 2 <= from <= to");
    }
    let fam = UBasisFamily::new(cfg.p.clone(), n_from..=n_to)?;
    let norms = fam.norms(cfg.precision)?;
    let one = Rational::from_integer(1.into());
    let tol = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(cfg.precision / 2));
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for (n, enc) in &norms {
        let status = if enc.is_degenerate() && enc.contains(&one) {
            Status::Pass
        } else if !enc.contains(&one) {
            Status::Fail
        } else if enc.width() < tol {
            Status::Pass
        } else {
            Status::Indeterminate
        };
        verdicts.push(verdict("normalization", status, format!("n = {n}: {enc}")));
        rows.push(json!({ "n": n, "norm": enc }));
    }
    let echo = config_echo(cfg, json!({ "nFrom": n_from, "nTo": n_to }));
    Ok(ReportEnvelope::new("unorm", echo, json!({ "norms": rows }), verdicts))
}

pub enum TSource {
    Random { num_bound: u64, den_bound: u64 },
    Given(BoundedSeq),
}

fn is_zero_input(t: &BoundedSeq, n_terms: u64) -> bool {
    (2..=n_terms).all(|n| t.value(n).is_zero())
}

pub fn cmd_lineable_demo(cfg: &RunConfig, source: &TSource, n_terms: u64) -> Result<ReportEnvelope> {
    cfg.validate()?;
    let (l, prec) = (cfg.window, cfg.precision);
    let inputs: Vec<BoundedSeq> = match source {
        TSource::Random { num_bound, den_bound } => {
            (0..3).map(|i| gen::random_bounded(cfg.seed.wrapping_add(i), *num_bound, *den_bound)).collect()
        }
        TSource::Given(t) => vec![t.clone()],
    };
    let run = apply_t_linea(&inputs[0], n_terms, l, &cfg.p, prec)?;
    let audit = zero_audit(&run.output);
    let zero = is_zero_input(&inputs[0], n_terms);
    let (structural, indet) = (audit.structural_zero.len(), audit.indeterminate.len());
    let mut verdicts = vec![if zero {
        let all = structural as u64 == l;
        let st = if all { Status::Pass } else { Status::Fail };
        verdict("no-spurious-zeros", st, format!("zero input: {structural} of {l} coordinates structurally zero"))
    } else {
        let st = if structural > 0 {
            Status::Fail
        } else if indet > 0 {
            Status::Indeterminate
        } else {
            Status::Pass
        };
        verdict("no-spurious-zeros", st, format!("{structural} structural zeros, {indet} indeterminate in window {l}"))
    }];
    let mut certs = json!({ "input": inputs[0], "run": run, "audit": audit });
    if inputs.len() > 1 {
        let images: Vec<SeqExpr> =
            inputs.iter().map(|t| apply_t_linea(t, n_terms, l, &cfg.p, prec).map(|r| r.image)).collect::<Result<_, _>>()?;
        let rep = independence_check(&images, l, CheckMode::Exact, prec)?;
        let st = match rep.outcome {
            Independence::Independent => Status::Pass,
            Independence::Dependent { .. } => Status::Fail,
            Independence::Indeterminate => Status::Indeterminate,
        };
        verdicts.push(verdict("independence", st, format!("images of seeds {}..{}", cfg.seed, cfg.seed.wrapping_add(2))));
        certs["independence"] = to_value(&rep);
    }
    let echo = config_echo(cfg, json!({ "nTerms": n_terms, "source": if inputs.len() > 1 { "random" } else { "file" } }));
    Ok(ReportEnvelope::new("lineable-demo", echo, certs, verdicts))
}

pub fn cmd_limit_lemma(cfg: &RunConfig, t: &BoundedSeq, r: u64, schedule: &KSchedule, epsilon: &Rational, j_max: u64) -> Result<ReportEnvelope> {
    cfg.validate()?;
    let scan = lemma_limit_scan(t, r, schedule, epsilon, j_max, cfg.precision)?;
    let mono = if scan.monotone() { Status::Pass } else { Status::Fail };
    let wit = match scan.witness {
        Some(j) => verdict("lemma-witness", Status::Pass, format!("certified below epsilon at j = {j}")),
        None => verdict("lemma-witness", Status::Fail, format!("no certified witness for j <= {j_max}")),
    };
    let verdicts = vec![verdict("monotonicity-in-k", mono, format!("{} probes", scan.probes.len())), wit];
    let echo = config_echo(
        cfg,
        json!({ "t": t, "r": r, "schedule": schedule.to_string(), "epsilon": seqspace_core::exact::format_rational(epsilon), "jMax": j_max }),
    );
    Ok(ReportEnvelope::new("limit-lemma", echo, json!({ "scan": scan }), verdicts))
}

/// Round-trips through JSON before verifying so the verdicts are exactly
/// what a replay of the emitted file gives.
fn reverify_trace(trace: &ConstructionTrace) -> Result<Vec<Verdict>> {
    let back: ConstructionTrace = serde_json::from_value(to_value(trace))?;
    Ok(verify_trace(&back))
}

pub fn cmd_build_family(cfg: &RunConfig, k: usize, m1: u64) -> Result<ReportEnvelope> {
    cfg.validate()?;
    let oracle = parse_oracle(&cfg.oracle)?;
    let trace = build_disjoint_family(&oracle, k, &cfg.build_config(), m1)?;
    let verdicts = reverify_trace(&trace)?;
    let echo = config_echo(cfg, json!({ "k": k, "m1": m1 }));
    Ok(ReportEnvelope::new("build-family", echo, json!({ "trace": trace }), verdicts))
}

pub fn parse_basis(text: &str) -> Result<Vec<SeqExpr>> {
    serde_json::from_str(text).context("basis file must be a JSON array of sequences")
}

pub fn cmd_extend(cfg: &RunConfig, basis: &[SeqExpr], k: usize) -> Result<ReportEnvelope> {
    cfg.validate()?;
    let oracle = parse_oracle(&cfg.oracle)?;
    let trace = extend_to_spaceable(basis, &oracle, k, &cfg.build_config())?;
    let verdicts = reverify_trace(&trace)?;
    let echo = config_echo(cfg, json!({ "k": k }));
    Ok(ReportEnvelope::new("extend", echo, json!({ "trace": trace }), verdicts))
}

pub fn cmd_collapse(cfg: &RunConfig, n_max: u64, k: usize, m11: u64) -> Result<ReportEnvelope> {
    cfg.validate()?;
    let oracle = parse_oracle(&cfg.oracle)?;
    let cc = CollapseConfig { p: cfg.p.clone(), window: cfg.window, precision: cfg.precision, k, n_max, m11 };
    let report = collapse_sequence(&oracle, &cc)?;
    let back: CollapseReport = serde_json::from_value(to_value(&report))?;
    let verdicts = verify_collapse(&back);
    let bounds: Vec<Value> = report
        .rows
        .iter()
        .map(|r| json!({ "n": r.n, "distanceBound": r.distance_bound, "scheduleSum": r.schedule_sum, "y": r.y() }))
        .collect();
    let echo = config_echo(cfg, json!({ "nMax": n_max, "k": k, "m11": m11 }));
    Ok(ReportEnvelope::new("collapse", echo, json!({ "collapse": report, "bounds": bounds }), verdicts))
}

/// Accepts a bare trace, a collapse report, or a report envelope holding one.
pub fn cmd_replay(text: &str) -> Result<ReportEnvelope> {
    let mut doc: Value = serde_json::from_str(text).context("replay input is not JSON")?;
    if doc.get("schema").and_then(Value::as_str) == Some(REPORT_SCHEMA) {
        let certs = doc.get_mut("certificates").ok_or_else(|| anyhow!("report has no certificates"))?;
        doc = match (certs.get("trace"), certs.get("collapse")) {
            (Some(t), _) => t.clone(),
            (None, Some(c)) => c.clone(),
            _ => bail!("report carries no replayable trace"),
        };
    }
    let schema = doc.get("schema").and_then(Value::as_str).unwrap_or_default().to_string();
    let (kind, verdicts) = match schema.as_str() {
        TRACE_SCHEMA => {
            let t: ConstructionTrace = serde_json::from_value(doc).context("trace does not match the schema")?;
            ("trace", verify_trace(&t))
        }
        COLLAPSE_SCHEMA => {
            let r: CollapseReport = serde_json::from_value(doc).context("collapse report does not match the schema")?;
            ("collapse", verify_collapse(&r))
        }
        other => bail!("unknown schema {other:?}"),
    };
    Ok(ReportEnvelope::new("replay", json!({ "schema": schema }), json!({ "replayed": kind }), verdicts))
}

pub fn render(env: &ReportEnvelope) -> String {
    serde_json::to_string_pretty(env).expect("report serializes") + "\n"
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use seqspace_core::exact::CertInterval;

    fn cfg(p: &str, window: u64) -> RunConfig {
        RunConfig::new(p.parse().unwrap(), 128, window)
    }

    #[test]
    fn unorm_p1() {
        let r = cmd_unorm(&cfg("1", 40), 2, 5).unwrap();
        assert_eq!(r.verdicts.len(), 4);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn unorm_sup() {
        let r = cmd_unorm(&cfg("inf", 40), 2, 2).unwrap();
        assert_eq!(r.certificates["norms"][0]["norm"], to_value(&CertInterval::from_int(1, 128)));
    }

    #[test]
    fn validation() {
        assert!(cmd_unorm(&cfg("1", 0), 2, 3).is_err());
        let mut c = cfg("1", 10);
        c.precision = 32;
        assert!(cmd_unorm(&c, 2, 3).is_err());
        assert!(parse_oracle("nope").is_err());
        assert_eq!(parse_oracle("geometric:1/3").unwrap().name(), "geometric");
    }

    #[test]
    fn zero_input_demo() {
        let t = BoundedSeq::constant(Rational::from_integer(0.into()));
        let r = cmd_lineable_demo(&cfg("1", 20), &TSource::Given(t), 8).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.certificates["audit"]["structuralZero"].as_array().unwrap().len(), 20);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(Status::Pass), 0);
        assert_eq!(exit_code(Status::Fail), 1);
        assert_eq!(exit_code(Status::Indeterminate), 2);
    }
}
