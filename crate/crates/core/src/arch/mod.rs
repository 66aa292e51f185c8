//! Model assembly: the five architecture variants, their configuration,
//! parameter initialization, forward/backward passes and checkpointing.

mod checkpoint;
mod config;
mod model;

pub use checkpoint::{load_model, save_model, CHECKPOINT_MAGIC};
pub use config::{ArchId, ModelConfig};
pub use model::{build_model, run_backward, run_forward, top_k_categories, ForwardPass, Mode, Model};
