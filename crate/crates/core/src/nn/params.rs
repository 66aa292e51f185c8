//! Named parameter and gradient storage.
//!
//! Parameters live in a `BTreeMap` keyed by a dotted path
//! (`text.gru1.fw.w_z`), so iteration order is the sorted name order that
//! initialization, the optimizer and checkpoint serialization all rely on.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterStore<S: Scalar> {
    params: BTreeMap<String, Tensor<S>>,
    grads: BTreeMap<String, Tensor<S>>,
}

impl<S: Scalar> Default for ParameterStore<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> ParameterStore<S> {
    pub fn new() -> Self {
        ParameterStore {
            params: BTreeMap::new(),
            grads: BTreeMap::new(),
        }
    }

    /// Register a parameter with a zeroed gradient accumulator.
    /// Names must be unique.
    pub fn insert(&mut self, name: &str, tensor: Tensor<S>) {
        assert!(
            !self.params.contains_key(name),
            "duplicate parameter name {name}"
        );
        self.grads
            .insert(name.to_string(), Tensor::zeros(tensor.shape()));
        self.params.insert(name.to_string(), tensor);
    }

    pub fn get(&self, name: &str) -> &Tensor<S> {
        self.params
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    pub fn get_mut(&mut self, name: &str) -> &mut Tensor<S> {
        self.params
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    pub fn try_get(&self, name: &str) -> Result<&Tensor<S>> {
        self.params
            .get(name)
            .ok_or_else(|| Error::Config(format!("unknown parameter {name}")))
    }

    pub fn grad(&self, name: &str) -> &Tensor<S> {
        self.grads
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    /// Direct access to a gradient accumulator, for sparse updates that
    /// would waste time materializing a dense contribution (embeddings).
    pub fn grad_mut(&mut self, name: &str) -> &mut Tensor<S> {
        self.grads
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    /// Accumulate a gradient contribution. Shape must match the parameter.
    pub fn add_grad(&mut self, name: &str, contribution: &Tensor<S>) {
        let g = self
            .grads
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"));
        assert_eq!(
            g.shape(),
            contribution.shape(),
            "gradient shape mismatch for {name}"
        );
        g.add_assign(contribution);
    }

    /// Accumulate `factor * contribution`.
    pub fn add_grad_scaled(&mut self, name: &str, contribution: &Tensor<S>, factor: S) {
        let g = self
            .grads
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"));
        g.add_scaled(contribution, factor);
    }

    pub fn zero_grads(&mut self) {
        for g in self.grads.values_mut() {
            g.fill(S::zero());
        }
    }

    /// Scale every gradient accumulator, e.g. by 1/batch_size.
    pub fn scale_grads(&mut self, factor: S) {
        for g in self.grads.values_mut() {
            g.scale(factor);
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn value_count(&self) -> usize {
        self.params.values().map(Tensor::len).sum()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    /// Sorted-name iteration over parameters.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor<S>)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn grads(&self) -> impl Iterator<Item = (&str, &Tensor<S>)> {
        self.grads.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Snapshot of the gradient map, keyed like the parameters.
    pub fn grads_cloned(&self) -> BTreeMap<String, Tensor<S>> {
        self.grads.clone()
    }

    /// Snapshot of the parameter values (used to keep the best epoch).
    pub fn values_cloned(&self) -> BTreeMap<String, Tensor<S>> {
        self.params.clone()
    }

    /// Overwrite parameters from a snapshot taken with [`values_cloned`].
    ///
    /// [`values_cloned`]: ParameterStore::values_cloned
    pub fn restore_values(&mut self, snapshot: &BTreeMap<String, Tensor<S>>) {
        assert_eq!(snapshot.len(), self.params.len(), "snapshot key mismatch");
        for (name, value) in snapshot {
            let param = self
                .params
                .get_mut(name)
                .unwrap_or_else(|| panic!("snapshot has unknown parameter {name}"));
            assert_eq!(param.shape(), value.shape());
            param.data_mut().copy_from_slice(value.data());
        }
    }

    /// Apply `update(name, param, grad)` to every parameter in sorted order.
    pub fn update_each(&mut self, mut update: impl FnMut(&str, &mut Tensor<S>, &Tensor<S>)) {
        for (name, param) in self.params.iter_mut() {
            let grad = &self.grads[name];
            update(name, param, grad);
        }
    }
}
