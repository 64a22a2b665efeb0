use seqspace_bench::{dense_basis, geometric};
use seqspace_core::zeros::staircase_reduce;

#[test]
fn dense_basis_is_full_rank() {
    let b = staircase_reduce(&dense_basis(6, 24), 24, 128).unwrap();
    assert_eq!(b.pivots.len(), 6);
}

#[test]
fn geometric_starts_at_half() {
    assert_eq!(geometric().coord(1).as_rational().unwrap(), seqspace_core::exact::rational::rat(1, 2));
}
