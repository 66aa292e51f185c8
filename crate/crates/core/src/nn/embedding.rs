//! Token-id lookup into a trainable embedding table.

use crate::scalar::Scalar;

use super::tensor::Tensor;

/// Gather rows of `table: [V, d]` for each id. Returns `[ids.len(), d]`.
pub fn embedding_forward<S: Scalar>(ids: &[u32], table: &Tensor<S>) -> Tensor<S> {
    let (vocab, d) = (table.shape()[0], table.shape()[1]);
    let mut y = Tensor::zeros(&[ids.len(), d]);
    for (t, &id) in ids.iter().enumerate() {
        let id = id as usize;
        assert!(id < vocab, "token id {id} out of range for table of {vocab}");
        y.row_mut(t).copy_from_slice(table.row(id));
    }
    y
}

/// Scatter-add sequence gradients back onto the table gradient. Repeated
/// ids accumulate, which is what makes frequent tokens move faster.
pub fn embedding_backward_into<S: Scalar>(
    dy: &Tensor<S>,
    ids: &[u32],
    grad_table: &mut Tensor<S>,
) {
    let d = grad_table.shape()[1];
    debug_assert_eq!(dy.shape(), &[ids.len(), d]);
    for (t, &id) in ids.iter().enumerate() {
        let row = grad_table.row_mut(id as usize);
        for (g, &v) in row.iter_mut().zip(dy.row(t)) {
            *g += v;
        }
    }
}

/// Padding mask: true where a token participates (id != 0).
pub fn pad_mask(ids: &[u32]) -> Vec<bool> {
    ids.iter().map(|&id| id != 0).collect()
}
