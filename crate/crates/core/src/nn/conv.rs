//! 1-d and 2-d convolution (cross-correlation, no kernel flip) with
//! zero "same" padding: `(k - 1) / 2` on the leading side and the rest on
//! the trailing side, so even kernels pad one extra at the end.

use crate::scalar::Scalar;

use super::dense::Activation;
use super::tensor::Tensor;

fn same_pad(k: usize) -> usize {
    (k - 1) / 2
}

#[derive(Debug, Clone)]
pub struct Conv1dCache<S: Scalar> {
    x: Tensor<S>,
    y: Tensor<S>,
    activation: Activation,
}

/// `x: [T, c_in]`, `w: [F, k, c_in]`, `b: [F]` -> `[T, F]`.
pub fn conv1d_forward<S: Scalar>(
    x: &Tensor<S>,
    w: &Tensor<S>,
    b: &Tensor<S>,
    activation: Activation,
) -> (Tensor<S>, Conv1dCache<S>) {
    let (t_len, c_in) = (x.shape()[0], x.shape()[1]);
    let (f_out, k) = (w.shape()[0], w.shape()[1]);
    debug_assert_eq!(w.shape()[2], c_in);
    let pad = same_pad(k);

    let mut y = Tensor::zeros(&[t_len, f_out]);
    for t in 0..t_len {
        for f in 0..f_out {
            let mut acc = b.data()[f];
            for dt in 0..k {
                let src = (t + dt) as isize - pad as isize;
                if src < 0 || src >= t_len as isize {
                    continue;
                }
                let xr = x.row(src as usize);
                let wr = &w.data()[(f * k + dt) * c_in..(f * k + dt + 1) * c_in];
                for c in 0..c_in {
                    acc += xr[c] * wr[c];
                }
            }
            y.data_mut()[t * f_out + f] = activation.apply(acc);
        }
    }

    let cache = Conv1dCache {
        x: x.clone(),
        y: y.clone(),
        activation,
    };
    (y, cache)
}

/// Returns `(dx, dw, db)`.
pub fn conv1d_backward<S: Scalar>(
    dy: &Tensor<S>,
    cache: &Conv1dCache<S>,
    w: &Tensor<S>,
) -> (Tensor<S>, Tensor<S>, Tensor<S>) {
    let (t_len, c_in) = (cache.x.shape()[0], cache.x.shape()[1]);
    let (f_out, k) = (w.shape()[0], w.shape()[1]);
    let pad = same_pad(k);

    let mut dx = Tensor::zeros(&[t_len, c_in]);
    let mut dw = Tensor::zeros(&[f_out, k, c_in]);
    let mut db = Tensor::zeros(&[f_out]);

    for t in 0..t_len {
        for f in 0..f_out {
            let g = dy.data()[t * f_out + f]
                * cache
                    .activation
                    .derivative_from_output(cache.y.data()[t * f_out + f]);
            if g == S::zero() {
                continue;
            }
            db.data_mut()[f] += g;
            for dt in 0..k {
                let src = (t + dt) as isize - pad as isize;
                if src < 0 || src >= t_len as isize {
                    continue;
                }
                let src = src as usize;
                for c in 0..c_in {
                    dw.data_mut()[(f * k + dt) * c_in + c] += g * cache.x.data()[src * c_in + c];
                    dx.data_mut()[src * c_in + c] += g * w.data()[(f * k + dt) * c_in + c];
                }
            }
        }
    }
    (dx, dw, db)
}

#[derive(Debug, Clone)]
pub struct Conv2dCache<S: Scalar> {
    x: Tensor<S>,
    y: Tensor<S>,
    activation: Activation,
}

/// Single-channel grid `x: [H, W]`, `w: [F, k, k]`, `b: [F]` -> `[H, W, F]`.
pub fn conv2d_forward<S: Scalar>(
    x: &Tensor<S>,
    w: &Tensor<S>,
    b: &Tensor<S>,
    activation: Activation,
) -> (Tensor<S>, Conv2dCache<S>) {
    let (h, wd) = (x.shape()[0], x.shape()[1]);
    let (f_out, k) = (w.shape()[0], w.shape()[1]);
    debug_assert_eq!(w.shape()[2], k);
    let pad = same_pad(k);

    let mut y = Tensor::zeros(&[h, wd, f_out]);
    for i in 0..h {
        for j in 0..wd {
            for f in 0..f_out {
                let mut acc = b.data()[f];
                for di in 0..k {
                    let si = (i + di) as isize - pad as isize;
                    if si < 0 || si >= h as isize {
                        continue;
                    }
                    for dj in 0..k {
                        let sj = (j + dj) as isize - pad as isize;
                        if sj < 0 || sj >= wd as isize {
                            continue;
                        }
                        acc += x.data()[si as usize * wd + sj as usize]
                            * w.data()[(f * k + di) * k + dj];
                    }
                }
                y.data_mut()[(i * wd + j) * f_out + f] = activation.apply(acc);
            }
        }
    }

    let cache = Conv2dCache {
        x: x.clone(),
        y: y.clone(),
        activation,
    };
    (y, cache)
}

/// Returns `(dx, dw, db)`.
pub fn conv2d_backward<S: Scalar>(
    dy: &Tensor<S>,
    cache: &Conv2dCache<S>,
    w: &Tensor<S>,
) -> (Tensor<S>, Tensor<S>, Tensor<S>) {
    let (h, wd) = (cache.x.shape()[0], cache.x.shape()[1]);
    let (f_out, k) = (w.shape()[0], w.shape()[1]);
    let pad = same_pad(k);

    let mut dx = Tensor::zeros(&[h, wd]);
    let mut dw = Tensor::zeros(&[f_out, k, k]);
    let mut db = Tensor::zeros(&[f_out]);

    for i in 0..h {
        for j in 0..wd {
            for f in 0..f_out {
                let out = (i * wd + j) * f_out + f;
                let g = dy.data()[out]
                    * cache.activation.derivative_from_output(cache.y.data()[out]);
                if g == S::zero() {
                    continue;
                }
                db.data_mut()[f] += g;
                for di in 0..k {
                    let si = (i + di) as isize - pad as isize;
                    if si < 0 || si >= h as isize {
                        continue;
                    }
                    for dj in 0..k {
                        let sj = (j + dj) as isize - pad as isize;
                        if sj < 0 || sj >= wd as isize {
                            continue;
                        }
                        let src = si as usize * wd + sj as usize;
                        dw.data_mut()[(f * k + di) * k + dj] += g * cache.x.data()[src];
                        dx.data_mut()[src] += g * w.data()[(f * k + di) * k + dj];
                    }
                }
            }
        }
    }
    (dx, dw, db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::grad_check;
    use crate::nn::rng::RngStream;
    use crate::nn::tensor::dot;
    use crate::nn::ParameterStore;
    use std::collections::BTreeMap;

    #[test]
    fn width_two_box_kernel_pads_on_the_right() {
        let x = Tensor::<f64>::from_vec(&[3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let w = Tensor::from_vec(&[1, 2, 1], vec![1.0, 1.0]).unwrap();
        let b = Tensor::zeros(&[1]);
        let (y, _) = conv1d_forward(&x, &w, &b, Activation::None);
        assert_eq!(y.shape(), &[3, 1]);
        assert_eq!(y.data(), &[3.0, 5.0, 3.0]);
    }

    #[test]
    fn width_one_identity_kernel_is_a_passthrough() {
        let x = Tensor::<f64>::from_vec(&[4, 1], vec![1.5, -2.0, 0.0, 3.25]).unwrap();
        let w = Tensor::from_vec(&[1, 1, 1], vec![1.0]).unwrap();
        let b = Tensor::zeros(&[1]);
        let (y, _) = conv1d_forward(&x, &w, &b, Activation::None);
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn odd_kernels_pad_symmetrically() {
        let x = Tensor::<f64>::from_vec(&[3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let w = Tensor::from_vec(&[1, 3, 1], vec![1.0, 1.0, 1.0]).unwrap();
        let b = Tensor::zeros(&[1]);
        let (y, _) = conv1d_forward(&x, &w, &b, Activation::None);
        assert_eq!(y.data(), &[3.0, 6.0, 5.0]);
    }

    #[test]
    fn two_d_box_kernel_on_a_two_by_two_grid() {
        let x = Tensor::<f64>::from_vec(&[2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let w = Tensor::from_vec(&[1, 2, 2], vec![1.0; 4]).unwrap();
        let b = Tensor::zeros(&[1]);
        let (y, _) = conv2d_forward(&x, &w, &b, Activation::None);
        assert_eq!(y.shape(), &[2, 2, 1]);
        assert_eq!(y.data(), &[10.0, 6.0, 7.0, 4.0]);
    }

    #[test]
    fn one_d_gradients_match_finite_differences() {
        for (k, seed) in [(1usize, 11u64), (2, 12), (3, 13), (4, 14)] {
            let (t_len, c_in, f_out) = (5, 2, 3);
            let mut rng = RngStream::new(seed);
            let draw = |rng: &mut RngStream, n: usize| -> Vec<f64> {
                (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()
            };
            let mut store = ParameterStore::new();
            store.insert(
                "x",
                Tensor::from_vec(&[t_len, c_in], draw(&mut rng, t_len * c_in)).unwrap(),
            );
            store.insert(
                "w",
                Tensor::from_vec(&[f_out, k, c_in], draw(&mut rng, f_out * k * c_in)).unwrap(),
            );
            store.insert("b", Tensor::from_vec(&[f_out], draw(&mut rng, f_out)).unwrap());
            let cvec = Tensor::from_vec(&[t_len * f_out], draw(&mut rng, t_len * f_out)).unwrap();

            let loss = {
                let cvec = cvec.clone();
                move |p: &ParameterStore<f64>| {
                    let (y, _) =
                        conv1d_forward(p.get("x"), p.get("w"), p.get("b"), Activation::Relu);
                    Ok(dot(y.data(), cvec.data()))
                }
            };

            let mut analytic = BTreeMap::new();
            {
                let (y, cache) =
                    conv1d_forward(store.get("x"), store.get("w"), store.get("b"), Activation::Relu);
                let dy = Tensor::from_vec(&[t_len, f_out], cvec.data().to_vec()).unwrap();
                let _ = y;
                let (dx, dw, db) = conv1d_backward(&dy, &cache, store.get("w"));
                analytic.insert("x".to_string(), dx);
                analytic.insert("w".to_string(), dw);
                analytic.insert("b".to_string(), db);
            }

            let report = grad_check(&mut store, loss, &analytic, 1e-3).unwrap();
            assert!(report.passed(), "k {k}: {:?}", report.failed);
        }
    }

    #[test]
    fn two_d_gradients_match_finite_differences() {
        for (k, seed) in [(2usize, 21u64), (3, 22), (5, 23)] {
            let (h, wd, f_out) = (5, 4, 2);
            let mut rng = RngStream::new(seed);
            let draw = |rng: &mut RngStream, n: usize| -> Vec<f64> {
                (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()
            };
            let mut store = ParameterStore::new();
            store.insert("x", Tensor::from_vec(&[h, wd], draw(&mut rng, h * wd)).unwrap());
            store.insert(
                "w",
                Tensor::from_vec(&[f_out, k, k], draw(&mut rng, f_out * k * k)).unwrap(),
            );
            store.insert("b", Tensor::from_vec(&[f_out], draw(&mut rng, f_out)).unwrap());
            let cvec =
                Tensor::from_vec(&[h * wd * f_out], draw(&mut rng, h * wd * f_out)).unwrap();

            let loss = {
                let cvec = cvec.clone();
                move |p: &ParameterStore<f64>| {
                    let (y, _) =
                        conv2d_forward(p.get("x"), p.get("w"), p.get("b"), Activation::Relu);
                    Ok(dot(y.data(), cvec.data()))
                }
            };

            let mut analytic = BTreeMap::new();
            {
                let (_, cache) =
                    conv2d_forward(store.get("x"), store.get("w"), store.get("b"), Activation::Relu);
                let dy = Tensor::from_vec(&[h, wd, f_out], cvec.data().to_vec()).unwrap();
                let (dx, dw, db) = conv2d_backward(&dy, &cache, store.get("w"));
                analytic.insert("x".to_string(), dx);
                analytic.insert("w".to_string(), dw);
                analytic.insert("b".to_string(), db);
            }

            let report = grad_check(&mut store, loss, &analytic, 1e-3).unwrap();
            assert!(report.passed(), "k {k}: {:?}", report.failed);
        }
    }
}
