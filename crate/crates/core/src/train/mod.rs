//! Training: seeded splits, the mini-batch Adam loop with early stopping,
//! and hyperparameter grids.

mod grid;
mod split;
mod trainer;

pub use grid::{best_index, grid_seed, load_grid, GridPoint};
pub use split::split_indices;
pub use trainer::{
    encode_dataset, encode_pair, param_digest, train, validation_recall, EncodedExample,
    EpochRecord, TrainConfig, TrainReport, N_RECOMMENDED,
};
