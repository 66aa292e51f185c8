//! Fully connected layer with optional activation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tensor::{matmul, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    None,
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub fn apply<S: Scalar>(self, x: S) -> S {
        match self {
            Activation::None => x,
            Activation::Relu => {
                if x > S::zero() {
                    x
                } else {
                    S::zero()
                }
            }
            Activation::Sigmoid => S::one() / (S::one() + (-x).exp()),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed in terms of the activation output `y`.
    pub fn derivative_from_output<S: Scalar>(self, y: S) -> S {
        match self {
            Activation::None => S::one(),
            Activation::Relu => {
                if y > S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Activation::Sigmoid => y * (S::one() - y),
            Activation::Tanh => S::one() - y * y,
        }
    }
}

/// Cached forward state needed by [`dense_backward`].
#[derive(Debug, Clone)]
pub struct DenseCache<S: Scalar> {
    x: Tensor<S>,
    y: Tensor<S>,
    activation: Activation,
}

/// `y = act(x W + b)` for `x: [n, d_in]`, `W: [d_in, d_out]`, `b: [d_out]`.
pub fn dense_forward<S: Scalar>(
    x: &Tensor<S>,
    w: &Tensor<S>,
    b: &Tensor<S>,
    activation: Activation,
) -> Result<(Tensor<S>, DenseCache<S>)> {
    if x.shape().len() != 2 || w.shape().len() != 2 || x.shape()[1] != w.shape()[0] {
        return Err(Error::Shape {
            expected: format!("x [n,{}]", w.shape().first().copied().unwrap_or(0)),
            got: format!("x {:?} vs W {:?}", x.shape(), w.shape()),
        });
    }
    if b.shape() != [w.shape()[1]] {
        return Err(Error::Shape {
            expected: format!("b [{}]", w.shape()[1]),
            got: format!("b {:?}", b.shape()),
        });
    }
    let mut y = matmul(x, w)?;
    let d_out = w.shape()[1];
    for i in 0..y.shape()[0] {
        let row = y.row_mut(i);
        for j in 0..d_out {
            row[j] = activation.apply(row[j] + b.data()[j]);
        }
    }
    let cache = DenseCache {
        x: x.clone(),
        y: y.clone(),
        activation,
    };
    Ok((y, cache))
}

/// Gradients of the scalar loss the upstream `dy` refers to.
/// Returns `(dx, dw, db)`.
pub fn dense_backward<S: Scalar>(
    dy: &Tensor<S>,
    cache: &DenseCache<S>,
    w: &Tensor<S>,
) -> (Tensor<S>, Tensor<S>, Tensor<S>) {
    let (n, d_in) = (cache.x.shape()[0], cache.x.shape()[1]);
    let d_out = w.shape()[1];
    debug_assert_eq!(dy.shape(), cache.y.shape());

    // dz = dy ⊙ act'(z), with act' read off the cached outputs.
    let mut dz = dy.clone();
    for (g, &y) in dz.data_mut().iter_mut().zip(cache.y.data().iter()) {
        *g = *g * cache.activation.derivative_from_output(y);
    }

    let mut dw = Tensor::zeros(&[d_in, d_out]);
    let mut db = Tensor::zeros(&[d_out]);
    let mut dx = Tensor::zeros(&[n, d_in]);
    for i in 0..n {
        let xrow = cache.x.row(i);
        let grow = dz.row(i);
        for (j, &g) in grow.iter().enumerate() {
            db.data_mut()[j] += g;
        }
        for (p, &xv) in xrow.iter().enumerate() {
            let wrow = &mut dw.data_mut()[p * d_out..(p + 1) * d_out];
            for (dwv, &g) in wrow.iter_mut().zip(grow.iter()) {
                *dwv += xv * g;
            }
        }
        let dxrow = dx.row_mut(i);
        for (p, dxv) in dxrow.iter_mut().enumerate() {
            let wrow = &w.data()[p * d_out..(p + 1) * d_out];
            let mut acc = S::zero();
            for (&wv, &g) in wrow.iter().zip(grow.iter()) {
                acc += wv * g;
            }
            *dxv = acc;
        }
    }
    (dx, dw, db)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_weights_pass_input_through() {
        let x = Tensor::from_vec(&[1, 2], vec![2.0f64, 3.0]).unwrap();
        let w = Tensor::from_vec(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let b = Tensor::zeros(&[2]);
        let (y, _) = dense_forward(&x, &w, &b, Activation::None).unwrap();
        assert_eq!(y.data(), &[2.0, 3.0]);
    }

    #[test]
    fn relu_clamps_negative_preactivation() {
        // x=[1,-2], W=[[1],[1]], b=[0]: pre-activation -1, clamped to 0.
        let x = Tensor::from_vec(&[1, 2], vec![1.0f64, -2.0]).unwrap();
        let w = Tensor::from_vec(&[2, 1], vec![1.0, 1.0]).unwrap();
        let b = Tensor::zeros(&[1]);
        let (y, _) = dense_forward(&x, &w, &b, Activation::Relu).unwrap();
        assert_eq!(y.data(), &[0.0]);
    }

    #[test]
    fn shape_mismatch_names_both_shapes() {
        let x = Tensor::<f64>::zeros(&[1, 3]);
        let w = Tensor::<f64>::zeros(&[2, 2]);
        let b = Tensor::<f64>::zeros(&[2]);
        let msg = dense_forward(&x, &w, &b, Activation::None)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("[1, 3]") && msg.contains("[2, 2]"), "{msg}");
    }

    #[test]
    fn sigmoid_backward_matches_manual_derivative() {
        let x = Tensor::from_vec(&[1, 1], vec![0.3f64]).unwrap();
        let w = Tensor::from_vec(&[1, 1], vec![1.7]).unwrap();
        let b = Tensor::from_vec(&[1], vec![-0.2]).unwrap();
        let (y, cache) = dense_forward(&x, &w, &b, Activation::Sigmoid).unwrap();
        let dy = Tensor::from_vec(&[1, 1], vec![1.0]).unwrap();
        let (dx, dw, db) = dense_backward(&dy, &cache, &w);
        let s = y.data()[0];
        let ds = s * (1.0 - s);
        assert!((dx.data()[0] - 1.7 * ds).abs() < 1e-12);
        assert!((dw.data()[0] - 0.3 * ds).abs() < 1e-12);
        assert!((db.data()[0] - ds).abs() < 1e-12);
    }
}
