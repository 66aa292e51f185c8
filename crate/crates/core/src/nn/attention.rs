//! Single-query additive attention over a hidden-state sequence.
//!
//! Scores each step with a small learned network, softmax-normalizes over
//! the unmasked steps and returns the weighted sum of hidden states:
//!
//!   e_t = v . tanh(h_t W + b),  alpha = softmax(e | mask),
//!   context = sum_t alpha_t h_t
//!
//! Masked positions are excluded from the softmax entirely. When every
//! position is masked (an all-padding branch input) the weights and the
//! context are zero.

use crate::scalar::Scalar;

use super::tensor::{dot, outer_add, vecmat, Tensor};

#[derive(Debug, Clone)]
pub struct AttentionCache<S: Scalar> {
    /// tanh(h_t W + b) per step, `[T, d]`.
    scored: Tensor<S>,
    /// Softmax weights, zero at masked steps.
    pub weights: Vec<S>,
    mask: Vec<bool>,
}

/// Forward pass. `h: [T, d]`, `w: [d, d]`, `b, v: [d]`, `mask[t]` true for
/// positions that participate. Returns `(context: [d], cache)`.
pub fn attention_forward<S: Scalar>(
    h: &Tensor<S>,
    mask: &[bool],
    w: &Tensor<S>,
    b: &Tensor<S>,
    v: &Tensor<S>,
) -> (Tensor<S>, AttentionCache<S>) {
    let (t_len, d) = (h.shape()[0], h.shape()[1]);
    debug_assert_eq!(mask.len(), t_len);

    let mut scored = Tensor::zeros(&[t_len, d]);
    let mut energy = vec![S::zero(); t_len];
    for t in 0..t_len {
        let row = scored.row_mut(t);
        vecmat(h.row(t), w.data(), d, row);
        for (s, &bv) in row.iter_mut().zip(b.data()) {
            *s = (*s + bv).tanh();
        }
        energy[t] = dot(row, v.data());
    }

    let mut weights = vec![S::zero(); t_len];
    let mut max = S::neg_infinity();
    for t in 0..t_len {
        if mask[t] && energy[t] > max {
            max = energy[t];
        }
    }
    if max > S::neg_infinity() {
        let mut total = S::zero();
        for t in 0..t_len {
            if mask[t] {
                let e = (energy[t] - max).exp();
                weights[t] = e;
                total += e;
            }
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
    }

    let mut context = Tensor::zeros(&[d]);
    for t in 0..t_len {
        if weights[t] != S::zero() {
            for (c, &hv) in context.data_mut().iter_mut().zip(h.row(t)) {
                *c += weights[t] * hv;
            }
        }
    }

    let cache = AttentionCache {
        scored,
        weights,
        mask: mask.to_vec(),
    };
    (context, cache)
}

/// Backward pass from the context gradient. Returns
/// `(dH: [T, d], dW, dB, dV)`.
pub fn attention_backward<S: Scalar>(
    dctx: &Tensor<S>,
    h: &Tensor<S>,
    cache: &AttentionCache<S>,
    w: &Tensor<S>,
    v: &Tensor<S>,
) -> (Tensor<S>, Tensor<S>, Tensor<S>, Tensor<S>) {
    let (t_len, d) = (h.shape()[0], h.shape()[1]);
    let alpha = &cache.weights;

    let mut dh = Tensor::zeros(&[t_len, d]);
    let mut dw = Tensor::zeros(&[d, d]);
    let mut db = Tensor::zeros(&[d]);
    let mut dv = Tensor::zeros(&[d]);

    // d alpha_t = dctx . h_t; direct path dH += alpha_t * dctx.
    let mut dalpha = vec![S::zero(); t_len];
    for t in 0..t_len {
        dalpha[t] = dot(dctx.data(), h.row(t));
        if alpha[t] != S::zero() {
            for (dhv, &cv) in dh.row_mut(t).iter_mut().zip(dctx.data()) {
                *dhv += alpha[t] * cv;
            }
        }
    }

    // Softmax backward over the unmasked positions.
    let mut inner = S::zero();
    for t in 0..t_len {
        inner += alpha[t] * dalpha[t];
    }

    let mut da = vec![S::zero(); d];
    for t in 0..t_len {
        if !cache.mask[t] || alpha[t] == S::zero() {
            continue;
        }
        let de = alpha[t] * (dalpha[t] - inner);
        let scored = cache.scored.row(t);
        // e_t = v . s_t with s_t = tanh(...): dv += de * s_t.
        for (dvv, &sv) in dv.data_mut().iter_mut().zip(scored) {
            *dvv += de * sv;
        }
        for k in 0..d {
            da[k] = de * v.data()[k] * (S::one() - scored[k] * scored[k]);
        }
        outer_add(dw.data_mut(), h.row(t), &da);
        for (dbv, &dav) in db.data_mut().iter_mut().zip(da.iter()) {
            *dbv += dav;
        }
        let dht = dh.row_mut(t);
        for (i, dhv) in dht.iter_mut().enumerate() {
            *dhv += dot(&w.data()[i * d..(i + 1) * d], &da);
        }
    }

    (dh, dw, db, dv)
}
