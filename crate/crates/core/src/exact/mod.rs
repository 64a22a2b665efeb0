//! Exact scalars and certified interval enclosures.

pub mod dyadic;
pub mod factor;
pub mod interval;
pub mod rational;
pub mod scalar;
pub mod sum;

pub use dyadic::Dyadic;
pub use interval::{pow_enclose, sign_certify, CertInterval, Sign, DEFAULT_PRECISION, MIN_PRECISION};
pub use rational::{format_rational, parse_rational, Rational};
pub use scalar::{Radical, ScalarExpr};
pub use sum::{certified_sign, eval_sum, FormalSum};
