use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::rational::{int, pow_int};
use crate::exact::{certified_sign, CertInterval, FormalSum, Rational, ScalarExpr, Sign};
use crate::norms::{p_norm, PExponent};
use crate::seq::SeqExpr;

/// Smallest t >= 0 with coordinate m + t certified nonzero; every earlier
/// offset must be structurally zero.
pub fn min_nonzero_after(x: &SeqExpr, m: u64, l: u64, precision: u32) -> Result<u64> {
    for k in m..=l {
        let c = x.coord(k);
        if c.is_zero() {
            continue;
        }
        if certified_sign(&c, precision) == Sign::ContainsZero {
            return Err(Error::IndeterminateWindow(m));
        }
        return Ok(k - m);
    }
    Err(Error::IndeterminateWindow(m))
}

/// Certified |c|.
pub fn abs_enclose(c: &FormalSum, precision: u32) -> CertInterval {
    c.enclose(precision).abs()
}

/// max{|u|/|z|, (V + ε|u|)/(ε|z|)} on enclosures, where V is the summed
/// magnitude of the earlier vectors at the pivot index.
pub fn lambda_bound(u: &CertInterval, z: &CertInterval, v: &CertInterval, eps: &Rational) -> Result<CertInterval> {
    let prec = z.precision();
    if z.sign() == Sign::ContainsZero {
        return Err(Error::ZDenominatorIndeterminate);
    }
    let e = CertInterval::from_rational(eps, prec);
    let first = u.div(z).ok_or(Error::ZDenominatorIndeterminate)?;
    let second = v.add(&e.mul(u)).div(&e.mul(z)).ok_or(Error::ZDenominatorIndeterminate)?;
    Ok(first.max(&second))
}

/// Smallest power of two 2^e, e >= 0, strictly above the upper end of `bound`.
pub fn pow2_above(bound: &Rational) -> Rational {
    let mut lam = Rational::one();
    while lam <= *bound {
        lam *= int(2);
    }
    lam
}

pub fn choose_lambda_multi(u: &SeqExpr, z: &SeqExpr, vs: &[SeqExpr], eps: &Rational, idx: u64, precision: u32) -> Result<ScalarExpr> {
    let zi = abs_enclose(&z.coord(idx), precision);
    let ui = abs_enclose(&u.coord(idx), precision);
    let vi = vs.iter().fold(CertInterval::zero(precision), |acc, v| acc.add(&abs_enclose(&v.coord(idx), precision)));
    let b = lambda_bound(&ui, &zi, &vi, eps)?;
    Ok(ScalarExpr::from_rational(pow2_above(&b.hi_rational())))
}

pub fn choose_lambda(u: &SeqExpr, z: &SeqExpr, v: &SeqExpr, eps: &Rational, idx: u64, precision: u32) -> Result<ScalarExpr> {
    choose_lambda_multi(u, z, std::slice::from_ref(v), eps, idx, precision)
}

/// Power of two ν with ‖x/ν‖_p <= 1, i.e. ν^q >= ‖x‖_p.
pub fn normalizer(x: &SeqExpr, p: &PExponent, l: u64, precision: u32) -> Result<Rational> {
    let n = p_norm(x, p, l, precision)?.hi_rational();
    if !n.is_positive() {
        return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
    }
    let q = p.q().q;
    // ν = 2^e with 2^(e·a) >= n^b for q = a/b.
    let (a, b) = (q.numer().clone(), q.denom().clone());
    let a: i64 = (&a).try_into().map_err(|_| Error::InvalidInput("exponent too large".into()))?;
    let b: i64 = (&b).try_into().map_err(|_| Error::InvalidInput("exponent too large".into()))?;
    let target = pow_int(&n, b);
    let ok = |e: i64| pow_int(&Rational::from_integer(BigInt::from(2)), e * a) >= target;
    let est = (crate::exact::rational::to_f64(&n).log2() / (a as f64 / b as f64)).ceil();
    let mut e = if est.is_finite() { est as i64 } else { 0 };
    while !ok(e) {
        e += 1;
    }
    while ok(e - 1) {
        e -= 1;
    }
    Ok(pow_int(&int(2), e))
}

/// Certified check of Σ|v_i[idx]| <= η |w[idx]| given magnitudes.
pub fn dominated(sum: &CertInterval, eta_lo: &Rational, target: &CertInterval) -> bool {
    !eta_lo.is_zero() && sum.hi_rational() <= eta_lo * target.lo_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn q(n: i64, d: i64) -> ScalarExpr {
        ScalarExpr::from_rational(rat(n, d))
    }

    #[test]
    fn offsets() {
        assert_eq!(min_nonzero_after(&SeqExpr::unit(5), 4, 10, 64), Ok(1));
        let pt = SeqExpr::power_tail(q(1, 1), q(1, 2), 3).unwrap();
        assert_eq!(min_nonzero_after(&pt, 2, 10, 64), Ok(1));
        let mut d = vec![int(1); 4];
        d.extend(vec![int(0); 5]);
        d.push(int(7));
        let v = SeqExpr::from_dense(&d);
        assert_eq!(min_nonzero_after(&v, 5, 12, 64), Ok(5));
        assert_eq!(min_nonzero_after(&SeqExpr::unit(20), 5, 12, 64), Err(Error::IndeterminateWindow(5)));
    }

    fn single(idx: u64, x: Rational) -> SeqExpr {
        SeqExpr::from_dense(&(1..=idx).map(|k| if k == idx { x.clone() } else { int(0) }).collect::<Vec<_>>())
    }

    #[test]
    fn lambda_examples() {
        let z = single(3, int(1));
        let zero = SeqExpr::zero();
        assert_eq!(choose_lambda(&zero, &z, &zero, &rat(1, 2), 3, 64).unwrap(), ScalarExpr::one());
        let u = single(3, int(1));
        assert_eq!(choose_lambda(&u, &z, &zero, &rat(1, 2), 3, 64).unwrap(), ScalarExpr::from_int(2));
        let u = single(3, int(3));
        let z = single(3, rat(1, 2));
        let v = single(3, int(1));
        assert_eq!(choose_lambda(&u, &z, &v, &rat(1, 2), 3, 64).unwrap(), ScalarExpr::from_int(16));
        assert_eq!(choose_lambda(&u, &zero, &v, &rat(1, 2), 3, 64), Err(Error::ZDenominatorIndeterminate));
    }

    #[test]
    fn normalizers() {
        let v = SeqExpr::from_dense(&[int(3), int(4)]);
        assert_eq!(normalizer(&v, &PExponent::one(), 2, 64).unwrap(), int(8));
        assert_eq!(normalizer(&v, &"2".parse().unwrap(), 2, 64).unwrap(), int(8));
        assert_eq!(normalizer(&v, &PExponent::Infinity, 2, 64).unwrap(), int(4));
        // ‖v‖_{1/2} = √3 + 2 ≈ 3.73, so ν^{1/2} >= 3.73 needs ν = 16.
        assert_eq!(normalizer(&v, &"1/2".parse().unwrap(), 2, 64).unwrap(), int(16));
        let small = SeqExpr::from_dense(&[rat(1, 5)]);
        assert_eq!(normalizer(&small, &PExponent::one(), 1, 64).unwrap(), rat(1, 4));
    }
}
