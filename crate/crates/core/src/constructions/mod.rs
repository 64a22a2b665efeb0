//! Explicit lineability constructions and their finite-window checks.

mod audit;
mod independence;
mod operator;
mod ubasis;

pub use audit::{zero_audit, ZeroAuditReport};
pub use independence::{
    combination_section, exact_independence, independence_check, interval_independence, CheckMode, Independence,
    IndependenceReport,
};
pub use operator::{apply_t_linea, apply_t_pointwise, make_pointwise_family, OperatorInput, OperatorRun};
pub use ubasis::{make_u, UBasisFamily};
