//! Exact tensor algebra for structural tensors of cyclic groups: rank and
//! border-rank expressions, monomial degenerations, independent zeroings,
//! tri-colored sum-free sets and the exponent bounds they imply.

pub mod bounds;
pub mod catalog;
pub mod construct;
pub mod degeneration;
pub mod error;
pub mod io;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
