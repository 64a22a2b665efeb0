//! Zero-pattern combinatorics on finite windows.

mod partition;
mod staircase;

pub use partition::{common_zeros, na_partition_check, structural_zeros, CommonZeroReport, NaPartitionReport, NaSet, NaViolation};
pub use staircase::{flat_combination, staircase_reduce, StaircaseBasis};
