//! Seeded random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqspace_core::exact::Rational;
use seqspace_core::linalg::RatMatrix;
use seqspace_core::norms::BoundedSeq;
use seqspace_core::seq::SeqExpr;

pub fn random_bounded(seed: u64, num_bound: u64, den_bound: u64) -> BoundedSeq {
    BoundedSeq::Seeded { seed, num_bound, den_bound }
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-num..=num).into(), rng.gen_range(1..=den).into())
}

/// `dim` rational rows of length `l`, entries a/b with |a| <= 3, b <= 3,
/// each entry zero with probability 1/3.
pub fn random_rows(rng: &mut ChaCha8Rng, dim: usize, l: usize) -> Vec<Vec<Rational>> {
    (0..dim)
        .map(|_| {
            (0..l)
                .map(|_| if rng.gen_ratio(1, 3) { Rational::from_integer(0.into()) } else { small_rational(rng, 3, 3) })
                .collect()
        })
        .collect()
}

/// A random basis of dimension 1..=max_dim on the first `l` coordinates.
/// Dependent draws are redrawn.
pub fn random_basis(seed: u64, max_dim: usize, l: usize) -> Vec<SeqExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=max_dim);
    loop {
        let rows = random_rows(&mut rng, dim, l);
        if RatMatrix::from_rows(rows.clone()).rank() == dim {
            return rows.iter().map(|r| SeqExpr::from_dense(r)).collect();
        }
    }
}

/// An independent family of 1..=max_alpha vectors supported in 1..=support,
/// all vanishing on a shared random set of two or three positions.
pub fn random_extension_input(seed: u64, max_alpha: usize, support: usize) -> Vec<SeqExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = rng.gen_range(1..=max_alpha);
    loop {
        let shared: Vec<usize> = (0..rng.gen_range(2..=3)).map(|_| rng.gen_range(0..support)).collect();
        let mut rows = random_rows(&mut rng, alpha, support);
        for row in &mut rows {
            for &s in &shared {
                row[s] = Rational::from_integer(0.into());
            }
        }
        if RatMatrix::from_rows(rows.clone()).rank() == alpha {
            return rows.iter().map(|r| SeqExpr::from_dense(r)).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_is_deterministic() {
        assert_eq!(random_basis(7, 6, 12), random_basis(7, 6, 12));
        let e = random_extension_input(3, 4, 10);
        assert!(!e.is_empty() && e.len() <= 4);
        assert_eq!(e, random_extension_input(3, 4, 10));
    }
}
