//! Shared inputs for the criterion benches in `benches/`.

use seqspace_core::exact::rational::{int, rat};
use seqspace_core::exact::ScalarExpr;
use seqspace_core::seq::SeqExpr;

/// 2^{-n} from n = 1 onward.
pub fn geometric() -> SeqExpr {
    SeqExpr::power_tail(ScalarExpr::from_rational(rat(1, 2)), ScalarExpr::from_rational(rat(1, 2)), 1).unwrap()
}

/// `dim` dense rows of length `l` with a lower-triangular nonzero pattern
/// and small integer entries, so the family is independent.
pub fn dense_basis(dim: usize, l: usize) -> Vec<SeqExpr> {
    (0..dim)
        .map(|i| {
            let row: Vec<_> = (0..l)
                .map(|j| if j < i { int(0) } else { int(((i * 7 + j * 3) % 5) as i64 + 1) - int(if j % 4 == 0 { 3 } else { 0 }) })
                .collect();
            SeqExpr::from_dense(&row)
        })
        .collect()
}
