use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("grid dimension `{field}` must be at least 1")]
    ZeroDimension { field: &'static str },

    #[error("non-finite value at flat index {0}")]
    NonFiniteValue(usize),

    #[error("({y}, {x}) is outside a {h}x{w} grid")]
    OutOfRange {
        y: usize,
        x: usize,
        h: usize,
        w: usize,
    },

    #[error("anchor frame {anchor} is out of range for {frames} frames")]
    InvalidAnchor { anchor: usize, frames: usize },

    #[error("threshold {0} must be finite and within [-1, 1]")]
    InvalidThreshold(f32),

    #[error("mean token of {what} has zero norm; automatic anchor selection is undefined")]
    ZeroNormFrameMean { what: String },

    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),
}
