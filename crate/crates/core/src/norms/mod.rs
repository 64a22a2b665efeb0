//! Certified p-norms, quasi-norms and the tail-limit lemma machinery.

pub mod bounded;
pub mod exponent;
pub mod lemma;
pub mod pnorm;

pub use bounded::BoundedSeq;
pub use exponent::{PExponent, QExponent};
pub use lemma::{
    default_n0, lemma_limit_scan, lemma_limit_witness, lemma_tail_enclose, KSchedule, LimitProbe, LimitScan,
    TailBoundCertificate,
};
pub use pnorm::{p_norm, tail_bound, TailBound};
