use thiserror::Error;

use crate::scalar::Ring;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: Ring, right: Ring },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("zero polynomial has no lowest-order coefficient")]
    ZeroPolynomial,

    #[error("operation requires an eps-polynomial scalar, got ring {0}")]
    NotEpsPoly(Ring),

    #[error("scale {scale} is not representable in ring {ring}")]
    ScaleNotRepresentable { scale: String, ring: Ring },

    #[error("malformed scalar for ring {ring}: {detail}")]
    MalformedScalar { ring: Ring, detail: String },

    #[error("unknown {axis} label {label}")]
    UnknownLabel { axis: char, label: String },

    #[error("duplicate {axis} label {label}")]
    DuplicateLabel { axis: char, label: String },

    #[error("variable sets differ on axis {0}")]
    VarSetMismatch(char),

    #[error("size cap exceeded: {what} would have {size} entries, cap is {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("border expansion has a nonzero coefficient at degree {degree}, below designated order {order}")]
    BorderOrderViolated { degree: usize, order: usize },

    #[error("degeneration does not verify: {0} violating terms")]
    DegenerationInvalid(usize),

    #[error("zeroing is not independent: {0}")]
    NotIndependent(String),

    #[error("structural check failed: {0}")]
    Structural(String),

    #[error("no sign change bracketing a root for q = {0}")]
    NoBracket(u64),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
