//! Neural recommendation of GIF reaction categories for tweet/reply pairs.
//!
//! The crate implements the full pipeline from raw JSON-lines datasets to a
//! submission file: text normalization and encoding, five dual-input
//! architectures whose layers and gradients are written from first
//! principles, Adam training with early stopping, a majority-voting
//! ensemble, and the Mean-Recall@k metric. Every backward pass is verified
//! against central finite differences.
//!
//! All numeric code is generic over [`scalar::Scalar`]; the aliases below
//! pin the two supported instantiations. Training and inference run in
//! `f32`, gradient verification runs in `f64`.

pub mod arch;
pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod nn;
pub mod scalar;
pub mod text;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Training/inference precision used by the command-line pipeline.
pub type TrainScalar = f32;
/// Precision used by the gradient-verification harness.
pub type CheckScalar = f64;

pub type Tensor32 = nn::Tensor<f32>;
pub type Tensor64 = nn::Tensor<f64>;
pub type Model32 = arch::Model<f32>;
pub type Model64 = arch::Model<f64>;
