use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::bounded::BoundedSeq;
use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, parse_rational, pow_int, to_f64};
use crate::exact::{pow_enclose, CertInterval, Dyadic, Rational};

const GUARD: u32 = 16;
/// Longest head the automatic n₀ choice will sum term by term.
pub const MAX_AUTO_HEAD: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBoundCertificate {
    pub r: u64,
    #[serde(with = "crate::exact::rational::serde_str")]
    pub k: Rational,
    pub head_length: u64,
    pub head_value: CertInterval,
    pub tail_bound: CertInterval,
    pub total: CertInterval,
}

impl TailBoundCertificate {
    /// Largest absolute value in the total enclosure.
    pub fn magnitude(&self) -> Rational {
        self.total.lo_rational().abs().max(self.total.hi_rational().abs())
    }
}

/// (r/n)^k, exact for integer k.
fn ratio_power(r: u64, n: u64, k: &Rational, precision: u32) -> CertInterval {
    let base = Rational::new(BigInt::from(r), BigInt::from(n));
    if k.denom().is_one() {
        let e: i64 = k.numer().try_into().expect("k fits i64");
        return CertInterval::from_rational(&pow_int(&base, e), precision);
    }
    pow_enclose(&base, k, precision).expect("positive base")
}

/// C r^k (n₀-1)^(1-k) / (k-1), enclosed.
fn integral_tail(c: &Rational, r: u64, k: &Rational, n0: u64, precision: u32) -> CertInterval {
    if c.is_zero() {
        return CertInterval::zero(precision);
    }
    let km1 = k - Rational::one();
    let rk = pow_enclose(&Rational::from_integer(BigInt::from(r)), k, precision).expect("r > 0");
    let nk = pow_enclose(&Rational::from_integer(BigInt::from(n0 - 1)), &-&km1, precision).expect("n0 > 1");
    let scale = CertInterval::from_rational(&(c / &km1), precision);
    rk.mul(&nk).mul(&scale)
}

/// Encloses Σ_{n>r} t_n (n/r)^(-k): the head n = r+1..n₀-1 is summed in
/// interval arithmetic, the rest is bounded by integral comparison.
pub fn lemma_tail_enclose(t: &BoundedSeq, r: u64, k: &Rational, n0: u64, precision: u32) -> Result<TailBoundCertificate> {
    if *k <= Rational::from_integer(2.into()) {
        return Err(Error::KTooSmall(format_rational(k)));
    }
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    if n0 <= r {
        return Err(Error::InvalidInput(format!("n0 = {n0} must exceed r = {r}")));
    }
    let c = t.sup_bound(precision).ok_or(Error::UncertifiableSup)?;
    let g = precision + GUARD;
    let mut head = CertInterval::zero(g);
    if !t.vanishes_from(r + 1) {
        for n in (r + 1)..n0 {
            let v = t.value(n);
            if v.is_zero() {
                continue;
            }
            let tv = v.enclose(g);
            head = head.add(&tv.mul(&ratio_power(r, n, k, g)));
        }
    }
    let tail = integral_tail(&c, r, k, n0, g);
    let b = tail.hi().clone();
    let total = CertInterval::new(head.lo().sub(&b), head.hi().add(&b), g).with_precision(precision);
    Ok(TailBoundCertificate {
        r,
        k: k.clone(),
        head_length: n0,
        head_value: head.with_precision(precision),
        tail_bound: CertInterval::new(Dyadic::zero(), b, g).with_precision(precision),
        total,
    })
}

/// Smallest n₀ (capped at `cap`) whose integral tail falls below `target`.
pub fn choose_n0(c: &Rational, r: u64, k: &Rational, target: f64, cap: u64) -> u64 {
    let cf = to_f64(c);
    if cf == 0.0 {
        return r + 1;
    }
    let kf = to_f64(k);
    // (n₀-1)^(k-1) >= C r^k / ((k-1) target)
    let log_need = (cf.ln() + kf * (r as f64).ln() - (kf - 1.0).ln() - target.ln()) / (kf - 1.0);
    let m = log_need.exp().ceil();
    let n0 = if m.is_finite() { (m as u64).saturating_add(1) } else { cap };
    n0.clamp(r + 1, cap.max(r + 1))
}

/// Default n₀ aiming at a tail term of 2^(-precision/2).
pub fn default_n0(t: &BoundedSeq, r: u64, k: &Rational, precision: u32) -> u64 {
    let c = t.sup_bound(precision).unwrap_or_else(Rational::one);
    choose_n0(&c, r, k, 2f64.powi(-(precision as i32 / 2)), MAX_AUTO_HEAD)
}

/// j ↦ k_j, either affine `slope*j + offset` or an explicit list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KSchedule {
    Affine { slope: Rational, offset: Rational },
    Explicit(Vec<Rational>),
}

impl KSchedule {
    pub fn k(&self, j: u64) -> Option<Rational> {
        match self {
            KSchedule::Affine { slope, offset } => Some(slope * Rational::from_integer(BigInt::from(j)) + offset),
            KSchedule::Explicit(v) => v.get((j as usize).checked_sub(1)?).cloned(),
        }
    }

    pub fn len(&self) -> Option<u64> {
        match self {
            KSchedule::Affine { .. } => None,
            KSchedule::Explicit(v) => Some(v.len() as u64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k1 = self.k(1).ok_or_else(|| Error::InvalidInput("empty k schedule".into()))?;
        if k1 <= Rational::from_integer(2.into()) {
            return Err(Error::KTooSmall(format_rational(&k1)));
        }
        match self {
            KSchedule::Affine { slope, .. } if !slope.is_positive() => {
                Err(Error::InvalidInput("k schedule must be strictly increasing".into()))
            }
            KSchedule::Explicit(v) if v.windows(2).any(|w| w[0] >= w[1]) => {
                Err(Error::InvalidInput("k schedule must be strictly increasing".into()))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for KSchedule {
    type Err = Error;

    /// Accepts `j+2`, `2j+1`, `3/2*j-1` or a comma list `3,4,5`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(pos) = t.find('j') {
            let (a, b) = (&t[..pos], &t[pos + 1..]);
            let a = a.strip_suffix('*').unwrap_or(a);
            let slope = match a {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                _ => parse_rational(a)?,
            };
            let offset = if b.is_empty() { Rational::zero() } else { parse_rational(b.strip_prefix('+').unwrap_or(b))? };
            return Ok(KSchedule::Affine { slope, offset });
        }
        let v: Result<Vec<Rational>> = t.split(',').map(parse_rational).collect();
        Ok(KSchedule::Explicit(v?))
    }
}

impl fmt::Display for KSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSchedule::Affine { slope, offset } => {
                write!(f, "{}*j", format_rational(slope))?;
                if !offset.is_zero() {
                    write!(f, "{}{}", if offset.is_negative() { "" } else { "+" }, format_rational(offset))?;
                }
                Ok(())
            }
            KSchedule::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(format_rational).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitProbe {
    pub j: u64,
    pub certificate: TailBoundCertificate,
    pub below_epsilon: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitScan {
    pub r: u64,
    pub schedule: String,
    #[serde(with = "crate::exact::rational::serde_str")]
    pub epsilon: Rational,
    pub head_length: u64,
    pub probes: Vec<LimitProbe>,
    pub witness: Option<u64>,
}

impl LimitScan {
    /// Upper ends of |Σ| are non-increasing along the probes.
    pub fn monotone(&self) -> bool {
        self.probes
            .windows(2)
            .all(|w| w[1].certificate.magnitude() <= w[0].certificate.magnitude())
    }
}

/// Probes j = 1..=j_max with one fixed head length n₀, chosen from k_1 so that
/// the integral tail stays below ε/4 for every probe; bounds are then
/// monotone in k. Stops at the first certified witness.
pub fn lemma_limit_scan(
    t: &BoundedSeq,
    r: u64,
    schedule: &KSchedule,
    epsilon: &Rational,
    j_max: u64,
    precision: u32,
) -> Result<LimitScan> {
    schedule.validate()?;
    if !epsilon.is_positive() {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let k1 = schedule.k(1).expect("validated");
    let c = t.sup_bound(precision).ok_or(Error::UncertifiableSup)?;
    let n0 = choose_n0(&c, r, &k1, to_f64(epsilon) / 4.0, MAX_AUTO_HEAD).max(2 * r + 2);
    let mut probes = Vec::new();
    let mut witness = None;
    for j in 1..=j_max {
        let Some(k) = schedule.k(j) else { break };
        let cert = lemma_tail_enclose(t, r, &k, n0, precision)?;
        let below = cert.magnitude() < *epsilon;
        probes.push(LimitProbe { j, certificate: cert, below_epsilon: below });
        if below {
            witness = Some(j);
            break;
        }
    }
    Ok(LimitScan {
        r,
        schedule: schedule.to_string(),
        epsilon: epsilon.clone(),
        head_length: n0,
        probes,
        witness,
    })
}

/// The smallest j ≤ j_max with a certified |Σ_{n>r} t_n (n/r)^(-k_j)| < ε.
pub fn lemma_limit_witness(
    t: &BoundedSeq,
    r: u64,
    schedule: &KSchedule,
    epsilon: &Rational,
    j_max: u64,
    precision: u32,
) -> Result<u64> {
    let scan = lemma_limit_scan(t, r, schedule, epsilon, j_max, precision)?;
    scan.witness.ok_or(Error::Exhausted(j_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    // Independent float oracle: direct partial sum plus the integral bound.
    fn oracle(t: impl Fn(u64) -> f64, r: u64, k: f64, terms: u64) -> (f64, f64) {
        let mut s = 0.0;
        for n in ((r + 1)..=terms).rev() {
            s += t(n) * (r as f64 / n as f64).powf(k);
        }
        let tail = (r as f64).powf(k) * (terms as f64).powf(1.0 - k) / (k - 1.0);
        (s, tail)
    }

    #[test]
    fn zero_sequence_gives_zero() {
        let t = BoundedSeq::constant(int(0));
        let c = lemma_tail_enclose(&t, 3, &int(5), 100, 128).unwrap();
        assert!(c.total.is_zero());
        let j = lemma_limit_witness(&t, 2, &"j+2".parse().unwrap(), &rat(1, 1_000_000_000), 10, 128).unwrap();
        assert_eq!(j, 1);
    }

    #[test]
    fn zeta_three_minus_one() {
        let t = BoundedSeq::constant(int(1));
        let c = lemma_tail_enclose(&t, 1, &int(3), 10_000, 128).unwrap();
        // ζ(3) - 1 = 0.2020569031595942...
        assert!(c.total.contains(&rat(2020569031595942, 10_000_000_000_000_000)));
        let (s, tail) = oracle(|_| 1.0, 1, 3.0, 1_000_000);
        assert!((s - 0.2020569031595942).abs() < tail + 1e-12);
        assert!(c.total.width() < rat(1, 10_000_000));
    }

    #[test]
    fn large_k_is_small() {
        let t = BoundedSeq::constant(int(1));
        let c = lemma_tail_enclose(&t, 2, &int(20), 1000, 128).unwrap();
        assert!(c.magnitude() < rat(1, 1000));
    }

    #[test]
    fn k_at_most_two_rejected() {
        let t = BoundedSeq::constant(int(1));
        assert!(matches!(lemma_tail_enclose(&t, 1, &int(2), 10, 64), Err(Error::KTooSmall(_))));
        assert!(matches!("j+1".parse::<KSchedule>().unwrap().validate(), Err(Error::KTooSmall(_))));
    }

    #[test]
    fn fractional_k() {
        let t = BoundedSeq::constant(int(1));
        let c = lemma_tail_enclose(&t, 1, &rat(7, 2), 2000, 128).unwrap();
        // ζ(7/2) - 1 = 0.12673386731705664...
        assert!(c.total.contains(&rat(12673386731705664, 100_000_000_000_000_000)));
    }

    #[test]
    fn schedule_parsing() {
        let s: KSchedule = "2j+1".parse().unwrap();
        assert_eq!(s.k(3), Some(int(7)));
        let s: KSchedule = "j+2".parse().unwrap();
        assert_eq!(s.k(1), Some(int(3)));
        let s: KSchedule = "3, 5, 8".parse().unwrap();
        assert_eq!(s.k(2), Some(int(5)));
        assert_eq!(s.k(4), None);
        assert_eq!("1/2*j-1".parse::<KSchedule>().unwrap().k(8), Some(int(3)));
    }

    #[test]
    fn constant_one_r2_witness_matches_oracle() {
        // Float oracle: Σ_{n≥3}(2/n)^{j+2} first drops below 1e-6 at j = 33.
        let mut first = None;
        for j in 1..60u64 {
            let k = (j + 2) as f64;
            let (s, tail) = oracle(|_| 1.0, 2, k, 200_000);
            if s + tail < 1e-6 {
                first = Some(j);
                break;
            }
        }
        assert_eq!(first, Some(33));
        let t = BoundedSeq::constant(int(1));
        let scan = lemma_limit_scan(&t, 2, &"j+2".parse().unwrap(), &rat(1, 1_000_000), 60, 128).unwrap();
        assert_eq!(scan.witness, Some(33));
        assert!(scan.monotone());
    }

    #[test]
    fn alternating_witness() {
        let t = BoundedSeq::alternating();
        let j = lemma_limit_witness(&t, 1, &"2j+1".parse().unwrap(), &rat(1, 10_000), 20, 128).unwrap();
        // Float oracle: Σ_{n≥2} (-1)^(n+1) n^(-(2j+1)) = -2^-k + 3^-k - ...; |.| < 1e-4 first at k = 15 (j = 7).
        let mut first = None;
        for jj in 1..20u64 {
            let k = (2 * jj + 1) as f64;
            let (s, tail) = oracle(|n| if n % 2 == 1 { 1.0 } else { -1.0 }, 1, k, 100_000);
            if s.abs() + tail < 1e-4 {
                first = Some(jj);
                break;
            }
        }
        assert_eq!(Some(j), first);
        assert!(j <= 20);
    }

    #[test]
    fn exhausted_when_j_max_small() {
        let t = BoundedSeq::constant(int(1));
        let e = lemma_limit_witness(&t, 2, &"j+2".parse().unwrap(), &rat(1, 1_000_000), 5, 128);
        assert_eq!(e, Err(Error::Exhausted(5)));
    }
}
