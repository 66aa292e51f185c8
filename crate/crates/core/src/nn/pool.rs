//! Max pooling with non-overlapping windows.
//!
//! Windows are `pool` wide with stride equal to the window, and a trailing
//! remainder that does not fill a window is dropped. On ties the earliest
//! element wins; the backward pass routes each output gradient to that
//! single argmax position.

use crate::scalar::Scalar;

use super::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct PoolCache {
    /// Flat index into the input for each output element.
    argmax: Vec<usize>,
    input_shape: Vec<usize>,
}

/// Pool a `[T, d]` sequence along the time axis, each column independently.
/// Returns `[T / pool, d]`.
pub fn maxpool1d_forward<S: Scalar>(x: &Tensor<S>, pool: usize) -> (Tensor<S>, PoolCache) {
    assert!(pool > 0, "pool width must be positive");
    let (t_len, d) = (x.shape()[0], x.shape()[1]);
    let out_t = t_len / pool;
    let mut y = Tensor::zeros(&[out_t, d]);
    let mut argmax = vec![0usize; out_t * d];
    for ot in 0..out_t {
        for c in 0..d {
            let mut best = x.data()[(ot * pool) * d + c];
            let mut best_at = (ot * pool) * d + c;
            for dt in 1..pool {
                let idx = (ot * pool + dt) * d + c;
                if x.data()[idx] > best {
                    best = x.data()[idx];
                    best_at = idx;
                }
            }
            y.data_mut()[ot * d + c] = best;
            argmax[ot * d + c] = best_at;
        }
    }
    let cache = PoolCache {
        argmax,
        input_shape: x.shape().to_vec(),
    };
    (y, cache)
}

/// Pool a `[H, W, F]` stack over `ph x pw` spatial windows, each channel
/// independently. Returns `[H / ph, W / pw, F]`.
pub fn maxpool2d_forward<S: Scalar>(
    x: &Tensor<S>,
    ph: usize,
    pw: usize,
) -> (Tensor<S>, PoolCache) {
    assert!(ph > 0 && pw > 0, "pool window must be positive");
    let (h, w, f) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let (oh, ow) = (h / ph, w / pw);
    let mut y = Tensor::zeros(&[oh, ow, f]);
    let mut argmax = vec![0usize; oh * ow * f];
    let at = |i: usize, j: usize, c: usize| (i * w + j) * f + c;
    for oi in 0..oh {
        for oj in 0..ow {
            for c in 0..f {
                let mut best_at = at(oi * ph, oj * pw, c);
                let mut best = x.data()[best_at];
                for di in 0..ph {
                    for dj in 0..pw {
                        let idx = at(oi * ph + di, oj * pw + dj, c);
                        if x.data()[idx] > best {
                            best = x.data()[idx];
                            best_at = idx;
                        }
                    }
                }
                let out = (oi * ow + oj) * f + c;
                y.data_mut()[out] = best;
                argmax[out] = best_at;
            }
        }
    }
    let cache = PoolCache {
        argmax,
        input_shape: x.shape().to_vec(),
    };
    (y, cache)
}

/// Route output gradients back to the argmax positions. Works for both the
/// 1-d and 2-d variants since the cache stores flat indices.
pub fn maxpool_backward<S: Scalar>(dy: &Tensor<S>, cache: &PoolCache) -> Tensor<S> {
    debug_assert_eq!(dy.len(), cache.argmax.len());
    let mut dx = Tensor::zeros(&cache.input_shape);
    for (out, &src) in cache.argmax.iter().enumerate() {
        dx.data_mut()[src] += dy.data()[out];
    }
    dx
}

/// A pooled position participates if any input position in its window does.
pub fn pool_mask(mask: &[bool], pool: usize) -> Vec<bool> {
    let out_t = mask.len() / pool;
    (0..out_t)
        .map(|ot| mask[ot * pool..(ot + 1) * pool].iter().any(|&m| m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_and_drops_remainder() {
        let x = Tensor::<f64>::from_vec(&[3, 1], vec![3.0, 5.0, 3.0]).unwrap();
        let (y, _) = maxpool1d_forward(&x, 2);
        assert_eq!(y.shape(), &[1, 1]);
        assert_eq!(y.data(), &[5.0]);
    }

    #[test]
    fn backward_routes_to_argmax_only() {
        let x = Tensor::<f64>::from_vec(&[4, 1], vec![1.0, 4.0, 2.0, 3.0]).unwrap();
        let (_, cache) = maxpool1d_forward(&x, 2);
        let dy = Tensor::from_vec(&[2, 1], vec![10.0, 20.0]).unwrap();
        let dx = maxpool_backward(&dy, &cache);
        assert_eq!(dx.data(), &[0.0, 10.0, 0.0, 20.0]);
    }

    #[test]
    fn first_index_wins_ties() {
        let x = Tensor::<f64>::from_vec(&[2, 1], vec![7.0, 7.0]).unwrap();
        let (y, cache) = maxpool1d_forward(&x, 2);
        assert_eq!(y.data(), &[7.0]);
        let dy = Tensor::from_vec(&[1, 1], vec![1.0]).unwrap();
        let dx = maxpool_backward(&dy, &cache);
        assert_eq!(dx.data(), &[1.0, 0.0]);
    }

    #[test]
    fn pools_columns_independently() {
        let x =
            Tensor::<f64>::from_vec(&[2, 2], vec![1.0, 9.0, 5.0, 2.0]).unwrap();
        let (y, _) = maxpool1d_forward(&x, 2);
        assert_eq!(y.data(), &[5.0, 9.0]);
    }

    #[test]
    fn two_d_windows_and_remainders() {
        // 3x3 grid, one channel; 2x2 pooling keeps only the top-left window.
        let vals = vec![1.0, 2.0, 9.0, 4.0, 3.0, 9.0, 9.0, 9.0, 9.0];
        let x = Tensor::<f64>::from_vec(&[3, 3, 1], vals).unwrap();
        let (y, cache) = maxpool2d_forward(&x, 2, 2);
        assert_eq!(y.shape(), &[1, 1, 1]);
        assert_eq!(y.data(), &[4.0]);
        let dy = Tensor::from_vec(&[1, 1, 1], vec![2.5]).unwrap();
        let dx = maxpool_backward(&dy, &cache);
        assert_eq!(dx.data()[3 * 1 + 0], 2.5);
        assert_eq!(dx.data().iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn two_d_channels_are_independent() {
        // 2x2 grid, two channels.
        let vals = vec![
            1.0, 8.0, // (0,0)
            2.0, 7.0, // (0,1)
            3.0, 6.0, // (1,0)
            4.0, 5.0, // (1,1)
        ];
        let x = Tensor::<f64>::from_vec(&[2, 2, 2], vals).unwrap();
        let (y, _) = maxpool2d_forward(&x, 2, 2);
        assert_eq!(y.data(), &[4.0, 8.0]);
    }

    #[test]
    fn mask_window_is_an_or() {
        assert_eq!(pool_mask(&[true, false, false, false, true], 2), vec![true, false]);
    }
}
