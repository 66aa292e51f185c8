//! Majority-vote ensembling and the Mean-Recall@k metric.

mod recall;
mod vote;

pub use recall::{instance_recall, mean_recall, top_k_indices};
pub use vote::{ensemble_predictions, majority_vote};
