//! Recall of the gold categories among the top-k recommendations.

use crate::scalar::Scalar;

/// Indices of the `k` largest scores, best first; equal scores are ordered
/// by ascending index so the selection is total and deterministic.
pub fn top_k_indices<S: Scalar>(scores: &[S], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must be finite")
            .then_with(|| a.cmp(&b))
    });
    order.truncate(k);
    order
}

/// Fraction of the gold items that appear among the recommendations.
/// `gold` must be non-empty and duplicate-free (dataset loading enforces
/// both).
pub fn instance_recall<T: PartialEq>(recommended: &[T], gold: &[T]) -> f64 {
    debug_assert!(!gold.is_empty());
    let hit = gold.iter().filter(|g| recommended.contains(g)).count();
    hit as f64 / gold.len() as f64
}

/// Unweighted mean; `None` for an empty iterator.
pub fn mean_recall(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_k_orders_by_score_then_index() {
        let scores = [0.1f64, 0.9, 0.9, 0.5];
        assert_eq!(top_k_indices(&scores, 3), vec![1, 2, 3]);
        assert_eq!(top_k_indices(&scores, 10), vec![1, 2, 3, 0]);
    }

    #[test]
    fn recall_counts_gold_hits() {
        assert_eq!(instance_recall(&[1, 2, 3], &[2, 9]), 0.5);
        assert_eq!(instance_recall(&[1, 2, 3], &[7]), 0.0);
        assert_eq!(instance_recall(&["a", "b"], &["a", "b"]), 1.0);
    }

    #[test]
    fn mean_is_unweighted() {
        assert_eq!(mean_recall([1.0, 0.0, 0.5]), Some(0.5));
        assert_eq!(mean_recall([]), None);
    }
}
