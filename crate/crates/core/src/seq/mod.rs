//! Lazy symbolic sequences and their finite windows.

pub mod expr;
pub mod truncate;

pub use expr::SeqExpr;
pub use truncate::{coord_entry, truncate, Coord, TruncatedVector};
