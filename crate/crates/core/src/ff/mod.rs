//! Finite fields, rationals, dense linear algebra and homogeneous forms.

pub mod field;
pub mod forms;
pub mod fp_poly;
pub mod matrix;
pub mod resultant;

pub use field::{Embedding, FieldCtx, FieldKind, Scalar};
pub use forms::{binomial, HomForm, MonomialBasis};
pub use matrix::Matrix;
pub use resultant::{macaulay_resultant, share_common_zero};

#[derive(Debug, thiserror::Error)]
pub enum FfError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field context mismatch: {0}")]
    ContextMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid point: all coordinates are zero")]
    InvalidPoint,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("undecided: {0}")]
    Undecided(String),
}
