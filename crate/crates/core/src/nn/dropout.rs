//! Inverted dropout: surviving activations are scaled by `1 / (1 - rate)`
//! at training time so inference applies the weights unchanged.
//!
//! With `rate == 0` or outside training the layer is a bitwise identity and
//! consumes no random draws, so toggling it cannot shift any other stream.

use crate::scalar::Scalar;

use super::rng::RngStream;
use super::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct DropoutCache<S: Scalar> {
    /// Per-element multiplier; empty when the layer was an identity.
    scale: Vec<S>,
}

impl<S: Scalar> DropoutCache<S> {
    pub fn identity() -> Self {
        DropoutCache { scale: Vec::new() }
    }
}

fn keep_scale<S: Scalar>(rate: f64) -> S {
    S::from_f64(1.0 / (1.0 - rate))
}

/// Element-wise dropout.
pub fn dropout_forward<S: Scalar>(
    x: &Tensor<S>,
    rate: f64,
    train: bool,
    rng: &mut RngStream,
) -> (Tensor<S>, DropoutCache<S>) {
    assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
    if !train || rate == 0.0 {
        return (x.clone(), DropoutCache::identity());
    }
    let keep = keep_scale::<S>(rate);
    let mut y = x.clone();
    let mut scale = vec![S::zero(); x.len()];
    for (out, s) in y.data_mut().iter_mut().zip(scale.iter_mut()) {
        if rng.next_f64() < rate {
            *out = S::zero();
        } else {
            *out *= keep;
            *s = keep;
        }
    }
    (y, DropoutCache { scale })
}

/// Channel dropout for a `[T, d]` sequence: each of the `d` columns is kept
/// or zeroed as a unit, one draw per column.
pub fn spatial_dropout_forward<S: Scalar>(
    x: &Tensor<S>,
    rate: f64,
    train: bool,
    rng: &mut RngStream,
) -> (Tensor<S>, DropoutCache<S>) {
    assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
    if !train || rate == 0.0 {
        return (x.clone(), DropoutCache::identity());
    }
    let (t_len, d) = (x.shape()[0], x.shape()[1]);
    let keep = keep_scale::<S>(rate);
    let column: Vec<S> = (0..d)
        .map(|_| if rng.next_f64() < rate { S::zero() } else { keep })
        .collect();
    let mut y = x.clone();
    let mut scale = vec![S::zero(); x.len()];
    for t in 0..t_len {
        for c in 0..d {
            y.data_mut()[t * d + c] *= column[c];
            scale[t * d + c] = column[c];
        }
    }
    (y, DropoutCache { scale })
}

/// Shared backward: multiply by the cached mask (identity when empty).
pub fn dropout_backward<S: Scalar>(dy: &Tensor<S>, cache: &DropoutCache<S>) -> Tensor<S> {
    if cache.scale.is_empty() {
        return dy.clone();
    }
    debug_assert_eq!(dy.len(), cache.scale.len());
    let mut dx = dy.clone();
    for (g, &s) in dx.data_mut().iter_mut().zip(cache.scale.iter()) {
        *g *= s;
    }
    dx
}
