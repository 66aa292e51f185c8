//! Numeric core: tensors, layers with analytic gradients, loss, optimizer
//! and the finite-difference verification harness.

pub mod adam;
pub mod attention;
pub mod conv;
pub mod dense;
pub mod dropout;
pub mod embedding;
pub mod gradcheck;
pub mod init;
pub mod loss;
pub mod params;
pub mod pool;
pub mod rng;
pub mod rnn;
pub mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use dense::Activation;
pub use params::ParameterStore;
pub use rng::RngStream;
pub use tensor::Tensor;
