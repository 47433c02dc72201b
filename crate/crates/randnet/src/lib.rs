//! Dictionary learning and classification from compressed random measurements.
//!
//! The core idea: instead of training on examples `y` in their original
//! dimension `N`, compress each example to `r = Φy` with a seeded random
//! measurement matrix `Φ` (dense Gaussian or row-sparse ±1) and learn a
//! dictionary `A` directly from the compressed data. The sparse-coding step
//! is an unrolled FISTA loop treated as a tied auto-encoder: the encoder
//! runs `T` proximal-gradient iterations with the operator `ΦA`, the decoder
//! reapplies the same `ΦA`, and the dictionary is trained by explicit
//! backpropagation through the unrolled iterations. A softmax head on the
//! sparse codes handles supervised classification.
//!
//! Modules:
//! - [`measurement`]: seeded measurement operators `Φ` (identity, Gaussian,
//!   row-sparse) with matrix-free apply/adjoint.
//! - [`dictionary`]: the unit-norm-column dictionary `A` and its step-size
//!   (Lipschitz) estimate.
//! - [`encoder`]: the unrolled FISTA forward pass and its trace.
//! - [`model`]: tied decoder, reconstruction loss, softmax classifier head.
//! - [`grad`]: hand-derived reverse-mode gradients plus a finite-difference
//!   oracle.
//! - [`data`]: simulation from the sparse generative model, IDX image
//!   loading, block partitioning with per-block seeded operators.
//! - [`train`]: ADAM, the two-stage training loops, evaluation metrics.
//! - [`baseline`]: classical alternating-minimization dictionary learning.

pub mod baseline;
pub mod data;
pub mod dictionary;
pub mod encoder;
pub mod error;
pub mod grad;
pub mod measurement;
pub mod model;
pub mod rng;
pub mod train;

pub use error::{RandNetError, Result};
