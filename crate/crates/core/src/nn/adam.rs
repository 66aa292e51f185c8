//! Adam optimizer with bias correction.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

use super::params::ParameterStore;
use super::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            ..Default::default()
        }
    }
}

/// Per-parameter first/second moment estimates and the shared step counter.
#[derive(Debug, Clone)]
pub struct AdamState<S: Scalar> {
    pub config: AdamConfig,
    t: u64,
    m: BTreeMap<String, Tensor<S>>,
    v: BTreeMap<String, Tensor<S>>,
}

impl<S: Scalar> AdamState<S> {
    pub fn new(config: AdamConfig) -> Self {
        AdamState {
            config,
            t: 0,
            m: BTreeMap::new(),
            v: BTreeMap::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One update from the gradients currently accumulated in `store`.
    ///
    /// t += 1; m = b1 m + (1-b1) g; v = b2 v + (1-b2) g^2;
    /// theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
    pub fn step(&mut self, store: &mut ParameterStore<S>) {
        self.t += 1;
        let t = self.t as i32;
        let lr = S::from_f64(self.config.lr);
        let b1 = S::from_f64(self.config.beta1);
        let b2 = S::from_f64(self.config.beta2);
        let eps = S::from_f64(self.config.epsilon);
        let one = S::one();
        let bias1 = one - b1.powi(t);
        let bias2 = one - b2.powi(t);

        let m = &mut self.m;
        let v = &mut self.v;
        store.update_each(|name, param, grad| {
            let m = m
                .entry(name.to_string())
                .or_insert_with(|| Tensor::zeros(param.shape()));
            let v = v
                .entry(name.to_string())
                .or_insert_with(|| Tensor::zeros(param.shape()));
            for ((theta, &g), (mi, vi)) in param
                .data_mut()
                .iter_mut()
                .zip(grad.data())
                .zip(m.data_mut().iter_mut().zip(v.data_mut().iter_mut()))
            {
                *mi = b1 * *mi + (one - b1) * g;
                *vi = b2 * *vi + (one - b2) * g * g;
                let m_hat = *mi / bias1;
                let v_hat = *vi / bias2;
                *theta = *theta - lr * m_hat / (v_hat.sqrt() + eps);
            }
        });
    }
}
