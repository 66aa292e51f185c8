//! Weight initialization.
//!
//! Every parameter is filled from its own sub-stream derived from the model
//! seed and the parameter name, so adding or removing a layer never shifts
//! the draws of an unrelated one.

use std::collections::HashMap;

use crate::scalar::Scalar;

use super::params::ParameterStore;
use super::rng::RngStream;
use super::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitKind {
    /// Biases.
    Zero,
    /// Dense, recurrent and attention weights: uniform in [-0.05, 0.05].
    Uniform,
    /// Convolution kernels: normal with mean 0 and stddev 0.05.
    Normal,
    /// Filled elsewhere (embedding tables).
    Skip,
}

pub const UNIFORM_LIMIT: f64 = 0.05;
pub const NORMAL_STDDEV: f64 = 0.05;

/// Fill every parameter in the store according to `kind_of(name)`.
pub fn init_parameters<S: Scalar>(
    store: &mut ParameterStore<S>,
    base: &RngStream,
    kind_of: impl Fn(&str) -> InitKind,
) {
    let names: Vec<String> = store.names().map(str::to_string).collect();
    for name in names {
        let kind = kind_of(&name);
        if kind == InitKind::Skip {
            continue;
        }
        let mut rng = base.derive(&format!("init.{name}"));
        let param = store.get_mut(&name);
        match kind {
            InitKind::Zero => param.fill(S::zero()),
            InitKind::Uniform => {
                for v in param.data_mut() {
                    *v = rng.uniform(-UNIFORM_LIMIT, UNIFORM_LIMIT);
                }
            }
            InitKind::Normal => {
                for v in param.data_mut() {
                    *v = rng.normal(0.0, NORMAL_STDDEV);
                }
            }
            InitKind::Skip => unreachable!(),
        }
    }
}

/// Fill an embedding table: the padding row 0 stays zero, rows whose word
/// has a pretrained vector copy it, and everything else (including the
/// out-of-vocabulary row 1) is uniform in [-0.05, 0.05].
///
/// `words[i]` is the word stored at row `i + 2`.
pub fn init_embedding<S: Scalar>(
    table: &mut Tensor<S>,
    words: &[String],
    pretrained: Option<&HashMap<String, Vec<S>>>,
    base: &RngStream,
    name: &str,
) {
    let (vocab, d) = (table.shape()[0], table.shape()[1]);
    debug_assert!(words.len() + 2 <= vocab + 1, "vocabulary larger than table");
    let mut rng = base.derive(&format!("init.{name}"));
    for row in 0..vocab {
        if row == 0 {
            table.row_mut(0).fill(S::zero());
            continue;
        }
        let vec = if row >= 2 {
            pretrained.and_then(|p| p.get(&words[row - 2]))
        } else {
            None
        };
        match vec {
            Some(v) => {
                assert_eq!(v.len(), d, "pretrained vector width mismatch");
                table.row_mut(row).copy_from_slice(v);
            }
            None => {
                for x in table.row_mut(row) {
                    *x = rng.uniform(-UNIFORM_LIMIT, UNIFORM_LIMIT);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fills_by_kind_and_is_reproducible() {
        let build = || {
            let mut store = ParameterStore::<f64>::new();
            store.insert("layer.w", Tensor::zeros(&[4, 4]));
            store.insert("layer.b", Tensor::from_vec(&[4], vec![9.0; 4]).unwrap());
            store.insert("conv.w", Tensor::zeros(&[2, 3, 3]));
            let base = RngStream::new(77);
            init_parameters(&mut store, &base, |name| {
                if name.ends_with(".b") {
                    InitKind::Zero
                } else if name.starts_with("conv.") {
                    InitKind::Normal
                } else {
                    InitKind::Uniform
                }
            });
            store
        };
        let a = build();
        let b = build();
        assert_eq!(a.get("layer.w").data(), b.get("layer.w").data());
        assert!(a.get("layer.b").data().iter().all(|&v| v == 0.0));
        assert!(a
            .get("layer.w")
            .data()
            .iter()
            .all(|&v| (-0.05..0.05).contains(&v)));
        assert!(a.get("layer.w").data().iter().any(|&v| v != 0.0));
        assert!(a.get("conv.w").data().iter().any(|&v| v.abs() > 0.05));
    }

    #[test]
    fn parameter_draws_are_independent_of_other_parameters() {
        let base = RngStream::new(5);
        let mut one = ParameterStore::<f64>::new();
        one.insert("a.w", Tensor::zeros(&[8]));
        init_parameters(&mut one, &base, |_| InitKind::Uniform);

        let mut two = ParameterStore::<f64>::new();
        two.insert("a.w", Tensor::zeros(&[8]));
        two.insert("extra.w", Tensor::zeros(&[8]));
        init_parameters(&mut two, &base, |_| InitKind::Uniform);

        assert_eq!(one.get("a.w").data(), two.get("a.w").data());
    }

    #[test]
    fn embedding_rows_pull_from_pretrained_when_available() {
        let mut table = Tensor::<f64>::from_vec(&[4, 2], vec![9.0; 8]).unwrap();
        let words = vec!["known".to_string(), "unknown".to_string()];
        let mut pre = HashMap::new();
        pre.insert("known".to_string(), vec![0.5, -0.5]);
        init_embedding(&mut table, &words, Some(&pre), &RngStream::new(1), "emb");
        assert_eq!(table.row(0), &[0.0, 0.0]);
        assert_eq!(table.row(2), &[0.5, -0.5]);
        for &v in table.row(1).iter().chain(table.row(3)) {
            assert!((-0.05..0.05).contains(&v) && v != 9.0);
        }
    }
}
