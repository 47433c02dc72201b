//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum RandNetError {
    /// Operand shapes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Row sparsity exceeds the number of columns.
    #[error("row sparsity {s} exceeds column count {n}")]
    Sparsity { s: usize, n: usize },

    /// A dictionary column collapsed to (near) zero norm, which signals
    /// training divergence.
    #[error("degenerate dictionary: column {col} has norm {norm:.3e}")]
    DegenerateDictionary { col: usize, norm: f64 },

    /// Non-finite values appeared during encoding (step size too large).
    #[error("encoder diverged at iteration {iter}: non-finite values (L too small?)")]
    Divergence { iter: usize },

    /// A stored encoder trace does not match the inputs it was replayed with.
    #[error("trace/input mismatch: {0}")]
    TraceMismatch(String),

    /// The code Gram matrix stayed singular even after damping.
    #[error("rank-deficient code Gram matrix in dictionary update")]
    RankDeficient,

    /// Bisection on the perturbation scale did not reach the target.
    #[error("perturbation bisection failed to reach target err {target}")]
    BisectionFailed { target: f64 },

    /// Malformed input file (bad magic number, inconsistent header).
    #[error("format error: {0}")]
    Format(String),

    /// Inputs that are individually valid but mutually inconsistent.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Invalid configuration value.
    #[error("invalid config: {0}")]
    Config(String),

    /// Training hit non-finite loss; the boxed dictionary is the last
    /// checkpoint with finite loss.
    #[error("training diverged at epoch {epoch}; last good checkpoint restored")]
    TrainDiverged {
        epoch: usize,
        last_good: Box<crate::dictionary::Dictionary>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RandNetError>;
