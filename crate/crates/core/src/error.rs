use thiserror::Error;

use crate::gf::{FieldSpec, GfError};
use crate::linalg::LinalgError;
use crate::params::ParamError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("{field} cannot host this code: {reason}")]
    FieldConstraint { field: FieldSpec, reason: String },
    #[error("expected {expected} data symbols, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("need at least {needed} nodes, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("supplied symbols are not consistent with any codeword")]
    Inconsistent,
    #[error("invalid repair request: {0}")]
    InvalidRepair(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("unrecoverable failure pattern: {0}")]
    Unrecoverable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
