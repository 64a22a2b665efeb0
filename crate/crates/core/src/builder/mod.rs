//! Recursive constructions of families with disjoint pivots, their
//! extension past a finite staircase basis, and the collapse sequence.

pub mod collapse;
pub mod engine;
pub mod oracle;
pub mod steps;
pub mod trace;
pub mod verify;

pub use collapse::{collapse_sequence, CollapseConfig, CollapseReport, CollapseRow, SignCheck, COLLAPSE_SCHEMA};
pub use engine::{build_disjoint_family, extend_to_spaceable, BuildConfig};
pub use oracle::SubspaceOracle;
pub use steps::{choose_lambda, min_nonzero_after};
pub use trace::{ConstructionTrace, TraceKind, TRACE_SCHEMA};
pub use verify::{overall, verify_collapse, verify_trace, Status, Verdict};
