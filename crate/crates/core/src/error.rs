use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidContext(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("degenerate parameters at spin {spin}: {detail}")]
    Degenerate { spin: String, detail: String },

    #[error("element is not in the coideal B (residual {residual:.3e})")]
    NotInCoideal { residual: f64 },

    #[error("Phi_C is not g-balanced for g = k^{exponent} (residual {residual:.3e})")]
    NotBalanced { exponent: f64, residual: f64 },

    #[error("stabilizer index {index} outside truncation |m| <= {truncation}")]
    OutsideTruncation { index: i64, truncation: i64 },

    #[error("cutoff too small: element needs B-spin cutoff >= {required}, got {cutoff}")]
    Margin { required: String, cutoff: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
