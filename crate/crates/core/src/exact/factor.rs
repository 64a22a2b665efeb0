use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_LIMIT: usize = 1 << 16;

fn primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; TRIAL_LIMIT + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= TRIAL_LIMIT {
            if sieve[i] {
                let mut j = i * i;
                while j <= TRIAL_LIMIT {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=TRIAL_LIMIT).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

/// Factors `n` into atoms by trial division over small primes. A cofactor
/// with no small prime divisor is returned as a single atom, so atoms are
/// primes except possibly the last one.
pub fn factor(n: &BigUint) -> Vec<(BigUint, u64)> {
    let mut out = Vec::new();
    if n.is_zero() || n.is_one() {
        return out;
    }
    if let Some(small) = n.to_u64() {
        return factor_u64(small);
    }
    let mut rest = n.clone();
    for &p in primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut mult = 0u64;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((pb, mult));
            if let Some(small) = rest.to_u64() {
                out.extend(factor_u64(small));
                return merge(out);
            }
        }
    }
    if !rest.is_one() {
        out.push((rest, 1));
    }
    merge(out)
}

fn factor_u64(mut n: u64) -> Vec<(BigUint, u64)> {
    let mut out = Vec::new();
    for &p in primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        let mut mult = 0;
        while n.is_multiple_of(p) {
            n /= p;
            mult += 1;
        }
        if mult > 0 {
            out.push((BigUint::from(p), mult));
        }
    }
    if n > 1 {
        out.push((BigUint::from(n), 1));
    }
    out
}

fn merge(mut v: Vec<(BigUint, u64)>) -> Vec<(BigUint, u64)> {
    v.sort();
    let mut out: Vec<(BigUint, u64)> = Vec::with_capacity(v.len());
    for (a, m) in v {
        match out.last_mut() {
            Some((b, k)) if *b == a => *k += m,
            _ => out.push((a, m)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(f: &[(BigUint, u64)]) -> BigUint {
        f.iter().fold(BigUint::one(), |acc, (a, m)| acc * a.pow(*m as u32))
    }

    #[test]
    fn small_numbers() {
        let f = factor(&BigUint::from(360u32));
        let got: Vec<(u64, u64)> = f.iter().map(|(a, m)| (a.to_u64().unwrap(), *m)).collect();
        assert_eq!(got, vec![(2, 3), (3, 2), (5, 1)]);
        assert!(factor(&BigUint::one()).is_empty());
    }

    #[test]
    fn large_power_of_small_primes() {
        let n = BigUint::from(6u32).pow(80) * BigUint::from(7u32);
        let f = factor(&n);
        assert_eq!(f.len(), 3);
        assert_eq!(product(&f), n);
    }

    #[test]
    fn big_cofactor_stays_an_atom() {
        let big = BigUint::from(1_000_000_007u64) * BigUint::from(998_244_353u64);
        let n = &big * BigUint::from(12u32);
        let f = factor(&n);
        assert_eq!(product(&f), n);
        assert!(f.iter().any(|(a, _)| *a == big));
    }
}
