use thiserror::Error;

use crate::fock::Config;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chain length {len} is outside the supported range {min}..={max}")]
    UnsupportedLength { len: usize, min: usize, max: usize },

    #[error("occupation {value} exceeds the per-site limit {limit}")]
    OccupationOverflow { value: u32, limit: u8 },

    #[error("site {site} is outside the chain 1..={len}")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("states live on different chains ({left} vs {right})")]
    ShapeMismatch { left: String, right: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{config} fails tiling condition {condition} at site {site}")]
    NotTiling { config: Config, condition: u8, site: usize },

    #[error("{config} is a tiling configuration and has no non-tiling class")]
    IsTiling { config: Config },

    #[error("basis is not invariant: {from} couples to {to} outside the basis")]
    NotInvariant { from: Config, to: Config },

    #[error("dimension {needed} exceeds the budget of {budget}")]
    Budget { needed: usize, budget: usize },

    #[error("invalid tiling: {0}")]
    InvalidTiling(String),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,
}

pub type Result<T> = std::result::Result<T, Error>;
