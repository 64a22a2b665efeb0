//! Certified finite-window constructions on sequence spaces whose members
//! have finitely many zero coordinates.

pub mod builder;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod norms;
pub mod seq;
pub mod zeros;

pub use error::{Error, Result};
