//! Dataset, category-inventory, pretrained-embedding and prediction I/O.

mod dataset;
mod embeddings;
mod inventory;
mod predictions;

pub use dataset::{load_dataset, load_gold, multi_hot, Dataset, Instance};
pub use embeddings::load_embeddings;
pub use inventory::{CategoryInventory, INVENTORY_SIZE};
pub use predictions::{read_predictions, write_predictions, Prediction};
