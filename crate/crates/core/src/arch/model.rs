//! The five dual-input architectures and their shared classification head.
//!
//! Both branches (tweet text and reply) run the same pipeline with their
//! own parameters — no weight sharing — and their feature vectors are
//! concatenated into the head: dense(relu) → dropout → dense(sigmoid).
//!
//! Forward passes return a cache sufficient for an exact backward pass;
//! `run_forward`/`run_backward` are free functions over an explicit
//! [`ParameterStore`] so the finite-difference harness can drive them while
//! owning the store.

use std::collections::HashMap;

use crate::corpus::CategoryInventory;
use crate::ensemble::top_k_indices;
use crate::error::{Error, Result};
use crate::nn::attention::{attention_backward, attention_forward, AttentionCache};
use crate::nn::conv::{
    conv1d_backward, conv1d_forward, conv2d_backward, conv2d_forward, Conv1dCache, Conv2dCache,
};
use crate::nn::dense::{dense_backward, dense_forward, Activation, DenseCache};
use crate::nn::dropout::{
    dropout_backward, dropout_forward, spatial_dropout_forward, DropoutCache,
};
use crate::nn::embedding::{embedding_backward_into, embedding_forward, pad_mask};
use crate::nn::init::{init_embedding, init_parameters, InitKind};
use crate::nn::params::ParameterStore;
use crate::nn::pool::{
    maxpool1d_forward, maxpool2d_forward, maxpool_backward, pool_mask, PoolCache,
};
use crate::nn::rng::RngStream;
use crate::nn::rnn::{
    concat_bi, dir_param_shapes, gru_dir_backward, gru_dir_forward, lstm_dir_backward,
    lstm_dir_forward, split_bi, GruDirCache, GruDirParams, LstmDirCache, LstmDirParams, RnnKind,
};
use crate::nn::tensor::Tensor;
use crate::scalar::Scalar;
use crate::text::Vocabulary;

use super::config::{ArchId, ModelConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

impl Mode {
    pub fn is_train(self) -> bool {
        self == Mode::Train
    }
}

#[derive(Debug, Clone)]
pub struct Model<S: Scalar> {
    pub config: ModelConfig,
    pub params: ParameterStore<S>,
    pub vocab: Vocabulary,
    /// Hash of the category inventory the model was built against; stored
    /// in checkpoints so predictions can refuse a mismatched inventory.
    pub inventory_hash: [u8; 32],
}

/// Register and initialize every parameter of a model.
///
/// The embedding tables get pretrained rows where available (padding row
/// stays zero); everything else follows the per-kind init rules, each
/// parameter drawing from its own name-derived stream of `config.seed`.
pub fn build_model<S: Scalar>(
    config: ModelConfig,
    vocab: Vocabulary,
    inventory: &CategoryInventory,
    pretrained: Option<&HashMap<String, Vec<S>>>,
) -> Result<Model<S>> {
    config.validate()?;
    if config.n_outputs != inventory.len() {
        return Err(Error::Config(format!(
            "config has {} outputs but the inventory defines {} categories",
            config.n_outputs,
            inventory.len()
        )));
    }
    if let Some(table) = pretrained {
        if let Some((word, v)) = table.iter().next() {
            if v.len() != config.embed_dim {
                return Err(Error::Config(format!(
                    "pretrained vectors are {}-dimensional (word {word:?}) but embed_dim is {}",
                    v.len(),
                    config.embed_dim
                )));
            }
        }
    }

    let mut params = ParameterStore::new();
    let rows = vocab.table_rows();
    for (name, shape) in parameter_shapes(&config, rows) {
        params.insert(&name, Tensor::zeros(&shape));
    }

    let base = RngStream::new(config.seed);
    init_parameters(&mut params, &base, init_kind);
    for branch in ["text", "reply"] {
        let name = format!("{branch}.embedding");
        init_embedding(params.get_mut(&name), vocab.words(), pretrained, &base, &name);
    }

    Ok(Model {
        config,
        params,
        vocab,
        inventory_hash: *inventory.hash(),
    })
}

/// Exhaustive (name, shape) listing of a model's parameters. Shared by
/// [`build_model`] and the checkpoint loader, which verifies a stored
/// tensor set against it.
pub(crate) fn parameter_shapes(
    config: &ModelConfig,
    table_rows: usize,
) -> Vec<(String, Vec<usize>)> {
    let (e, u) = (config.embed_dim, config.rnn_units);
    let mut out = Vec::new();

    let rnn = |out: &mut Vec<_>, branch: &str, layer: &str, kind: RnnKind, d: usize| {
        for dir in ["fw", "bw"] {
            for (suffix, shape) in dir_param_shapes(kind, d, u) {
                out.push((format!("{branch}.{layer}.{dir}.{suffix}"), shape));
            }
        }
    };
    let attention = |out: &mut Vec<_>, branch: &str| {
        out.push((format!("{branch}.attn.w"), vec![2 * u, 2 * u]));
        out.push((format!("{branch}.attn.b"), vec![2 * u]));
        out.push((format!("{branch}.attn.v"), vec![2 * u]));
    };

    for branch in ["text", "reply"] {
        out.push((format!("{branch}.embedding"), vec![table_rows, e]));
        match config.arch {
            ArchId::A => {
                rnn(&mut out, branch, "gru1", RnnKind::Gru, e);
                attention(&mut out, branch);
            }
            ArchId::B => {
                for &k in &config.conv2d_kernels {
                    let f = config.conv2d_filters;
                    out.push((format!("{branch}.conv2.k{k}.w"), vec![f, k, k]));
                    out.push((format!("{branch}.conv2.k{k}.b"), vec![f]));
                }
            }
            ArchId::C => {
                for &k in &config.conv1d_kernels {
                    let f = config.conv1d_filters;
                    out.push((format!("{branch}.conv1.k{k}.w"), vec![f, k, e]));
                    out.push((format!("{branch}.conv1.k{k}.b"), vec![f]));
                }
                rnn(&mut out, branch, "lstm1", RnnKind::Lstm, config.conv1d_filters);
                attention(&mut out, branch);
            }
            ArchId::D => {
                rnn(&mut out, branch, "gru1", RnnKind::Gru, e);
                rnn(&mut out, branch, "gru2", RnnKind::Gru, 2 * u);
                attention(&mut out, branch);
            }
            ArchId::E => {
                rnn(&mut out, branch, "lstm1", RnnKind::Lstm, e);
                attention(&mut out, branch);
            }
        }
    }
    out.push((
        "head.dense1.w".to_string(),
        vec![config.head_input_dim(), config.dense_units],
    ));
    out.push(("head.dense1.b".to_string(), vec![config.dense_units]));
    out.push((
        "head.out.w".to_string(),
        vec![config.dense_units, config.n_outputs],
    ));
    out.push(("head.out.b".to_string(), vec![config.n_outputs]));
    out
}

fn init_kind(name: &str) -> InitKind {
    let last = name.rsplit('.').next().expect("dotted name");
    if last == "embedding" {
        InitKind::Skip
    } else if last.starts_with('b') {
        InitKind::Zero
    } else if name.contains(".conv") {
        InitKind::Normal
    } else {
        InitKind::Uniform
    }
}

#[derive(Debug, Clone)]
enum BiCache<S: Scalar> {
    Gru(GruDirCache<S>, GruDirCache<S>),
    Lstm(LstmDirCache<S>, LstmDirCache<S>),
}

#[derive(Debug, Clone)]
enum BranchStage<S: Scalar> {
    /// A, D, E: one or two bidirectional layers, attention, dropout.
    Rnn {
        rnn1: BiCache<S>,
        layer1: &'static str,
        /// D only: second stacked layer with its input (= rnn1 output).
        rnn2: Option<(BiCache<S>, Tensor<S>)>,
        /// The sequence attention ran over.
        attn_in: Tensor<S>,
        attn: AttentionCache<S>,
        drop: DropoutCache<S>,
    },
    /// B: spatial dropout, four parallel 2-D convolutions, 2x2 pooling.
    Conv2 {
        sdrop: DropoutCache<S>,
        /// Conv input after spatial dropout.
        grid: Tensor<S>,
        convs: Vec<Conv2dCache<S>>,
        pools: Vec<PoolCache>,
        pooled_dims: [usize; 3],
    },
    /// C: three summed 1-D convolutions, pooling, BiLSTM, attention.
    ConvRnn {
        convs: Vec<Conv1dCache<S>>,
        pool: PoolCache,
        pooled: Tensor<S>,
        rnn1: BiCache<S>,
        attn_in: Tensor<S>,
        attn: AttentionCache<S>,
        drop: DropoutCache<S>,
    },
}

#[derive(Debug, Clone)]
struct BranchCache<S: Scalar> {
    ids: Vec<u32>,
    x: Tensor<S>,
    feat: Tensor<S>,
    stage: BranchStage<S>,
}

#[derive(Debug, Clone)]
struct HeadCache<S: Scalar> {
    feat_text_len: usize,
    dense1: DenseCache<S>,
    drop: DropoutCache<S>,
    out: DenseCache<S>,
}

/// Everything the backward pass needs, plus the sigmoid scores.
#[derive(Debug, Clone)]
pub struct ForwardPass<S: Scalar> {
    pub scores: Tensor<S>,
    text: BranchCache<S>,
    reply: BranchCache<S>,
    head: HeadCache<S>,
}

/// Forward over an explicit parameter store (see module docs).
pub fn run_forward<S: Scalar>(
    config: &ModelConfig,
    params: &ParameterStore<S>,
    text_ids: &[u32],
    reply_ids: &[u32],
    mode: Mode,
    rng: &mut RngStream,
) -> Result<ForwardPass<S>> {
    for (name, ids, want) in [
        ("text", text_ids, config.len_text),
        ("reply", reply_ids, config.len_reply),
    ] {
        if ids.len() != want {
            return Err(Error::Shape {
                expected: format!("{name} sequence of length {want}"),
                got: format!("length {}", ids.len()),
            });
        }
    }

    let text = branch_forward(config, params, "text", text_ids, mode, rng)?;
    let reply = branch_forward(config, params, "reply", reply_ids, mode, rng)?;

    let feat_text_len = text.feat.len();
    let mut z = Vec::with_capacity(feat_text_len + reply.feat.len());
    z.extend_from_slice(text.feat.data());
    z.extend_from_slice(reply.feat.data());
    let z = Tensor::from_vec(&[1, z.len()], z)?;

    let (y1, dense1) = dense_forward(
        &z,
        params.get("head.dense1.w"),
        params.get("head.dense1.b"),
        Activation::Relu,
    )?;
    let (y1d, drop) = dropout_forward(&y1, config.head_dropout, mode.is_train(), rng);
    let (y2, out) = dense_forward(
        &y1d,
        params.get("head.out.w"),
        params.get("head.out.b"),
        Activation::Sigmoid,
    )?;
    let scores = Tensor::from_vec(&[config.n_outputs], y2.data().to_vec())?;

    Ok(ForwardPass {
        scores,
        text,
        reply,
        head: HeadCache {
            feat_text_len,
            dense1,
            drop,
            out,
        },
    })
}

fn bi_forward<S: Scalar>(
    params: &ParameterStore<S>,
    branch: &str,
    layer: &str,
    kind: RnnKind,
    x: &Tensor<S>,
) -> (Tensor<S>, BiCache<S>) {
    let fw = format!("{branch}.{layer}.fw.");
    let bw = format!("{branch}.{layer}.bw.");
    match kind {
        RnnKind::Gru => {
            let (hf, cf) = gru_dir_forward(x, &GruDirParams::gather(params, &fw), false, None);
            let (hb, cb) = gru_dir_forward(x, &GruDirParams::gather(params, &bw), true, None);
            (concat_bi(&hf, &hb), BiCache::Gru(cf, cb))
        }
        RnnKind::Lstm => {
            let (hf, cf) = lstm_dir_forward(x, &LstmDirParams::gather(params, &fw), false, None);
            let (hb, cb) = lstm_dir_forward(x, &LstmDirParams::gather(params, &bw), true, None);
            (concat_bi(&hf, &hb), BiCache::Lstm(cf, cb))
        }
    }
}

fn attention_over<S: Scalar>(
    params: &ParameterStore<S>,
    branch: &str,
    h: &Tensor<S>,
    mask: &[bool],
) -> (Tensor<S>, AttentionCache<S>) {
    attention_forward(
        h,
        mask,
        params.get(&format!("{branch}.attn.w")),
        params.get(&format!("{branch}.attn.b")),
        params.get(&format!("{branch}.attn.v")),
    )
}

fn branch_forward<S: Scalar>(
    config: &ModelConfig,
    params: &ParameterStore<S>,
    branch: &str,
    ids: &[u32],
    mode: Mode,
    rng: &mut RngStream,
) -> Result<BranchCache<S>> {
    let x = embedding_forward(ids, params.get(&format!("{branch}.embedding")));
    let mask = pad_mask(ids);
    let train = mode.is_train();

    let (feat, stage) = match config.arch {
        ArchId::A | ArchId::D | ArchId::E => {
            let (kind, layer1) = match config.arch {
                ArchId::A | ArchId::D => (RnnKind::Gru, "gru1"),
                _ => (RnnKind::Lstm, "lstm1"),
            };
            let (h1, rnn1) = bi_forward(params, branch, layer1, kind, &x);
            let (attn_in, rnn2) = if config.arch == ArchId::D {
                let (h2, c2) = bi_forward(params, branch, "gru2", RnnKind::Gru, &h1);
                (h2, Some((c2, h1)))
            } else {
                (h1, None)
            };
            let (ctx, attn) = attention_over(params, branch, &attn_in, &mask);
            let (feat, drop) = dropout_forward(&ctx, config.branch_dropout, train, rng);
            (
                feat,
                BranchStage::Rnn {
                    rnn1,
                    layer1,
                    rnn2,
                    attn_in,
                    attn,
                    drop,
                },
            )
        }
        ArchId::B => {
            let (grid, sdrop) = spatial_dropout_forward(&x, config.spatial_dropout, train, rng);
            let mut convs = Vec::new();
            let mut pools = Vec::new();
            let mut pooled = Vec::new();
            for &k in &config.conv2d_kernels {
                let (y, c) = conv2d_forward(
                    &grid,
                    params.get(&format!("{branch}.conv2.k{k}.w")),
                    params.get(&format!("{branch}.conv2.k{k}.b")),
                    Activation::Relu,
                );
                let (p, pc) = maxpool2d_forward(&y, 2, 2);
                convs.push(c);
                pools.push(pc);
                pooled.push(p);
            }
            let dims = [
                pooled[0].shape()[0],
                pooled[0].shape()[1],
                pooled[0].shape()[2],
            ];
            let feat = flatten_pooled(&pooled);
            (
                feat,
                BranchStage::Conv2 {
                    sdrop,
                    grid,
                    convs,
                    pools,
                    pooled_dims: dims,
                },
            )
        }
        ArchId::C => {
            let mut convs = Vec::new();
            let mut summed = Tensor::zeros(&[ids.len(), config.conv1d_filters]);
            for &k in &config.conv1d_kernels {
                let (y, c) = conv1d_forward(
                    &x,
                    params.get(&format!("{branch}.conv1.k{k}.w")),
                    params.get(&format!("{branch}.conv1.k{k}.b")),
                    Activation::Relu,
                );
                summed.add_assign(&y);
                convs.push(c);
            }
            let (pooled, pool) = maxpool1d_forward(&summed, 2);
            let (h, rnn1) = bi_forward(params, branch, "lstm1", RnnKind::Lstm, &pooled);
            let mask2 = pool_mask(&mask, 2);
            let (ctx, attn) = attention_over(params, branch, &h, &mask2);
            let (feat, drop) = dropout_forward(&ctx, config.branch_dropout, train, rng);
            (
                feat,
                BranchStage::ConvRnn {
                    convs,
                    pool,
                    pooled,
                    rnn1,
                    attn_in: h,
                    attn,
                    drop,
                },
            )
        }
    };

    Ok(BranchCache {
        ids: ids.to_vec(),
        x,
        feat,
        stage,
    })
}

/// Row-wise concatenation along the column axis of the pooled conv stacks,
/// flattened: for each pooled row, the four kernel branches' values appear
/// back to back.
fn flatten_pooled<S: Scalar>(pooled: &[Tensor<S>]) -> Tensor<S> {
    let (t2, rest) = (pooled[0].shape()[0], pooled[0].len() / pooled[0].shape()[0]);
    let mut out = Vec::with_capacity(t2 * rest * pooled.len());
    for i in 0..t2 {
        for p in pooled {
            out.extend_from_slice(&p.data()[i * rest..(i + 1) * rest]);
        }
    }
    Tensor::from_vec(&[out.len()], out).expect("volume matches by construction")
}

/// Inverse of [`flatten_pooled`] for the gradient.
fn split_pooled<S: Scalar>(dfeat: &[S], n_kernels: usize, dims: [usize; 3]) -> Vec<Tensor<S>> {
    let [t2, e2, f] = dims;
    let rest = e2 * f;
    let mut parts = vec![Tensor::zeros(&[t2, e2, f]); n_kernels];
    let mut src = 0;
    for i in 0..t2 {
        for part in parts.iter_mut() {
            part.data_mut()[i * rest..(i + 1) * rest]
                .copy_from_slice(&dfeat[src..src + rest]);
            src += rest;
        }
    }
    parts
}

/// Backward over an explicit parameter store, accumulating into its
/// gradient buffers. `dscores` is the loss gradient w.r.t. the sigmoid
/// scores.
pub fn run_backward<S: Scalar>(
    config: &ModelConfig,
    params: &mut ParameterStore<S>,
    pass: &ForwardPass<S>,
    dscores: &Tensor<S>,
) {
    let dy = Tensor::from_vec(&[1, dscores.len()], dscores.data().to_vec())
        .expect("row vector reshape");
    let (dy1d, dw_out, db_out) = {
        let w = params.get("head.out.w");
        dense_backward(&dy, &pass.head.out, w)
    };
    params.add_grad("head.out.w", &dw_out);
    params.add_grad("head.out.b", &db_out);

    let dy1 = dropout_backward(&dy1d, &pass.head.drop);
    let (dz, dw1, db1) = {
        let w = params.get("head.dense1.w");
        dense_backward(&dy1, &pass.head.dense1, w)
    };
    params.add_grad("head.dense1.w", &dw1);
    params.add_grad("head.dense1.b", &db1);

    let ft = pass.head.feat_text_len;
    let dtext = Tensor::from_vec(&[ft], dz.data()[..ft].to_vec()).expect("text split");
    let dreply = Tensor::from_vec(&[dz.len() - ft], dz.data()[ft..].to_vec()).expect("reply split");
    branch_backward(config, params, "text", &pass.text, &dtext);
    branch_backward(config, params, "reply", &pass.reply, &dreply);
}

fn bi_backward<S: Scalar>(
    params: &mut ParameterStore<S>,
    branch: &str,
    layer: &str,
    dh: &Tensor<S>,
    x: &Tensor<S>,
    cache: &BiCache<S>,
) -> Tensor<S> {
    let fw = format!("{branch}.{layer}.fw.");
    let bw = format!("{branch}.{layer}.bw.");
    let (dhf, dhb) = split_bi(dh);
    match cache {
        BiCache::Gru(cf, cb) => {
            let (mut dx, gf) = {
                let p = GruDirParams::gather(params, &fw);
                gru_dir_backward(&dhf, x, &p, cf)
            };
            gf.accumulate_into(params, &fw, S::one());
            let (dxb, gb) = {
                let p = GruDirParams::gather(params, &bw);
                gru_dir_backward(&dhb, x, &p, cb)
            };
            gb.accumulate_into(params, &bw, S::one());
            dx.add_assign(&dxb);
            dx
        }
        BiCache::Lstm(cf, cb) => {
            let (mut dx, gf) = {
                let p = LstmDirParams::gather(params, &fw);
                lstm_dir_backward(&dhf, x, &p, cf)
            };
            gf.accumulate_into(params, &fw, S::one());
            let (dxb, gb) = {
                let p = LstmDirParams::gather(params, &bw);
                lstm_dir_backward(&dhb, x, &p, cb)
            };
            gb.accumulate_into(params, &bw, S::one());
            dx.add_assign(&dxb);
            dx
        }
    }
}

fn attention_backward_over<S: Scalar>(
    params: &mut ParameterStore<S>,
    branch: &str,
    dctx: &Tensor<S>,
    attn_in: &Tensor<S>,
    attn: &AttentionCache<S>,
) -> Tensor<S> {
    let (dh, dw, db, dv) = {
        let w = params.get(&format!("{branch}.attn.w"));
        let v = params.get(&format!("{branch}.attn.v"));
        attention_backward(dctx, attn_in, attn, w, v)
    };
    params.add_grad(&format!("{branch}.attn.w"), &dw);
    params.add_grad(&format!("{branch}.attn.b"), &db);
    params.add_grad(&format!("{branch}.attn.v"), &dv);
    dh
}

fn branch_backward<S: Scalar>(
    config: &ModelConfig,
    params: &mut ParameterStore<S>,
    branch: &str,
    cache: &BranchCache<S>,
    dfeat: &Tensor<S>,
) {
    let dx = match &cache.stage {
        BranchStage::Rnn {
            rnn1,
            layer1,
            rnn2,
            attn_in,
            attn,
            drop,
        } => {
            let dctx = dropout_backward(dfeat, drop);
            let dh = attention_backward_over(params, branch, &dctx, attn_in, attn);
            match rnn2 {
                Some((c2, h1)) => {
                    let dh1 = bi_backward(params, branch, "gru2", &dh, h1, c2);
                    bi_backward(params, branch, layer1, &dh1, &cache.x, rnn1)
                }
                None => bi_backward(params, branch, layer1, &dh, &cache.x, rnn1),
            }
        }
        BranchStage::Conv2 {
            sdrop,
            grid,
            convs,
            pools,
            pooled_dims,
        } => {
            let parts = split_pooled(dfeat.data(), config.conv2d_kernels.len(), *pooled_dims);
            let mut dgrid = Tensor::zeros(grid.shape());
            for ((&k, part), (conv, pool)) in config
                .conv2d_kernels
                .iter()
                .zip(parts.iter())
                .zip(convs.iter().zip(pools.iter()))
            {
                let dconv = maxpool_backward(part, pool);
                let (dg, dw, db) = {
                    let w = params.get(&format!("{branch}.conv2.k{k}.w"));
                    conv2d_backward(&dconv, conv, w)
                };
                params.add_grad(&format!("{branch}.conv2.k{k}.w"), &dw);
                params.add_grad(&format!("{branch}.conv2.k{k}.b"), &db);
                dgrid.add_assign(&dg);
            }
            dropout_backward(&dgrid, sdrop)
        }
        BranchStage::ConvRnn {
            convs,
            pool,
            pooled,
            rnn1,
            attn_in,
            attn,
            drop,
        } => {
            let dctx = dropout_backward(dfeat, drop);
            let dh = attention_backward_over(params, branch, &dctx, attn_in, attn);
            let dpooled = bi_backward(params, branch, "lstm1", &dh, pooled, rnn1);
            let dsummed = maxpool_backward(&dpooled, pool);
            let mut dx = Tensor::zeros(cache.x.shape());
            for (&k, conv) in config.conv1d_kernels.iter().zip(convs.iter()) {
                let (dxk, dw, db) = {
                    let w = params.get(&format!("{branch}.conv1.k{k}.w"));
                    conv1d_backward(&dsummed, conv, w)
                };
                params.add_grad(&format!("{branch}.conv1.k{k}.w"), &dw);
                params.add_grad(&format!("{branch}.conv1.k{k}.b"), &db);
                dx.add_assign(&dxk);
            }
            dx
        }
    };

    if config.trainable_embeddings {
        let name = format!("{branch}.embedding");
        embedding_backward_into(&dx, &cache.ids, params.grad_mut(&name));
    }
}

impl<S: Scalar> Model<S> {
    pub fn forward(
        &self,
        text_ids: &[u32],
        reply_ids: &[u32],
        mode: Mode,
        rng: &mut RngStream,
    ) -> Result<ForwardPass<S>> {
        run_forward(&self.config, &self.params, text_ids, reply_ids, mode, rng)
    }

    /// Accumulate loss gradients for one example into the parameter store.
    pub fn backward(&mut self, pass: &ForwardPass<S>, dscores: &Tensor<S>) {
        run_backward(&self.config, &mut self.params, pass, dscores)
    }

    /// Deterministic inference scores (no dropout, no randomness).
    pub fn infer(&self, text_ids: &[u32], reply_ids: &[u32]) -> Result<Tensor<S>> {
        let mut rng = RngStream::new(0);
        Ok(self
            .forward(text_ids, reply_ids, Mode::Infer, &mut rng)?
            .scores)
    }
}

/// Names of the `k` best-scoring categories, score descending with
/// inventory order breaking ties.
pub fn top_k_categories<S: Scalar>(
    scores: &Tensor<S>,
    k: usize,
    inventory: &CategoryInventory,
) -> Vec<String> {
    top_k_indices(scores.data(), k)
        .into_iter()
        .map(|i| inventory.name(i).to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::grad_check;
    use crate::nn::loss::bce_loss;
    use std::collections::BTreeMap;

    fn tiny_config(arch: ArchId, seed: u64) -> ModelConfig {
        let mut c = ModelConfig::defaults(arch, seed);
        c.embed_dim = 4;
        c.rnn_units = 3;
        c.dense_units = 5;
        c.n_outputs = 7;
        c.len_text = 4;
        c.len_reply = 4;
        c
    }

    fn tiny_inventory(n: usize) -> CategoryInventory {
        CategoryInventory::from_names((0..n).map(|i| format!("cat{i}")).collect()).unwrap()
    }

    fn tiny_vocab() -> Vocabulary {
        Vocabulary::from_words(vec!["alpha".into(), "beta".into(), "gamma".into()])
    }

    fn tiny_model(arch: ArchId, seed: u64) -> Model<f64> {
        build_model(
            tiny_config(arch, seed),
            tiny_vocab(),
            &tiny_inventory(7),
            None,
        )
        .unwrap()
    }

    #[test]
    fn same_seed_builds_identical_parameters() {
        for arch in ArchId::ALL {
            let a = tiny_model(arch, 11);
            let b = tiny_model(arch, 11);
            for (name, t) in a.params.iter() {
                assert_eq!(t.data(), b.params.get(name).data(), "{arch:?} {name}");
            }
            let c = tiny_model(arch, 12);
            let differs = a
                .params
                .iter()
                .any(|(name, t)| t.data() != c.params.get(name).data());
            assert!(differs, "{arch:?}: different seed must change parameters");
        }
    }

    #[test]
    fn parameter_count_matches_closed_form() {
        for arch in ArchId::ALL {
            let m = tiny_model(arch, 3);
            assert_eq!(
                m.params.value_count(),
                m.config.param_count(m.vocab.table_rows()),
                "{arch:?}"
            );
        }
        // And at publication scale, without building the tensors.
        let c = ModelConfig::defaults(ArchId::A, 0);
        let gru = 3 * (300 * 128 + 128 * 128 + 128);
        let attn = 256 * 256 + 256 + 256;
        let head = 512 * 100 + 100 + 100 * 43 + 43;
        assert_eq!(c.param_count(0), 2 * (2 * gru + attn) + head);
    }

    #[test]
    fn pretrained_rows_are_copied_exactly() {
        let mut pre = HashMap::new();
        pre.insert("beta".to_string(), vec![0.25, -0.5, 0.75, -1.0]);
        let m = build_model(
            tiny_config(ArchId::A, 5),
            tiny_vocab(),
            &tiny_inventory(7),
            Some(&pre),
        )
        .unwrap();
        for branch in ["text", "reply"] {
            let table = m.params.get(&format!("{branch}.embedding"));
            let row = m.vocab.id("beta") as usize;
            assert_eq!(table.row(row), &[0.25, -0.5, 0.75, -1.0]);
            assert_eq!(table.row(0), &[0.0; 4]);
        }
    }

    #[test]
    fn wrong_embedding_width_is_rejected() {
        let mut pre = HashMap::new();
        pre.insert("beta".to_string(), vec![1.0, 2.0]);
        let err = build_model(
            tiny_config(ArchId::A, 5),
            tiny_vocab(),
            &tiny_inventory(7),
            Some(&pre),
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("2-dimensional"), "{err}");
    }

    #[test]
    fn inference_is_reproducible_and_in_range() {
        for arch in ArchId::ALL {
            let m = tiny_model(arch, 21);
            let text = [2, 3, 4, 0];
            let reply = [4, 4, 0, 0];
            let a = m.infer(&text, &reply).unwrap();
            let b = m.infer(&text, &reply).unwrap();
            assert_eq!(a.data(), b.data(), "{arch:?}");
            assert!(a.data().iter().all(|&s| s > 0.0 && s < 1.0), "{arch:?}");
            assert_eq!(a.len(), 7);
        }
    }

    #[test]
    fn wrong_sequence_length_is_a_shape_error() {
        let m = tiny_model(ArchId::A, 2);
        let err = m.infer(&[2, 3], &[0, 0, 0, 0]).unwrap_err().to_string();
        assert!(err.contains("length 4") || err.contains("length 2"), "{err}");
    }

    #[test]
    fn all_pad_input_depends_only_on_head_parameters() {
        let m = tiny_model(ArchId::A, 9);
        let scores = m.infer(&[0; 4], &[0; 4]).unwrap();
        // Both branch features are zero (zero padding row, fully masked
        // attention), so the head alone determines the scores; recompute
        // it by hand from the stored parameters.
        let b1 = m.params.get("head.dense1.b");
        let w2 = m.params.get("head.out.w");
        let b2 = m.params.get("head.out.b");
        let hidden: Vec<f64> = b1.data().iter().map(|&v| v.max(0.0)).collect();
        let mut expected = Vec::new();
        for k in 0..7 {
            let mut acc = b2.data()[k];
            for (j, &h) in hidden.iter().enumerate() {
                acc += h * w2.data()[j * 7 + k];
            }
            expected.push(1.0 / (1.0 + (-acc).exp()));
        }
        assert_eq!(scores.data(), expected.as_slice());
    }

    #[test]
    fn top_k_respects_score_then_inventory_order() {
        let inv = tiny_inventory(7);
        let scores = Tensor::from_vec(&[7], vec![0.1, 0.9, 0.1, 0.9, 0.1, 0.1, 0.8]).unwrap();
        assert_eq!(top_k_categories(&scores, 3, &inv), vec!["cat1", "cat3", "cat6"]);
        let flat = Tensor::from_vec(&[7], vec![0.5; 7]).unwrap();
        assert_eq!(
            top_k_categories(&flat, 6, &inv),
            vec!["cat0", "cat1", "cat2", "cat3", "cat4", "cat5"]
        );
    }

    /// End-to-end gradient check of one tiny architecture: BCE loss over
    /// the forward pass, dropout active with a fixed per-call stream, at
    /// an operating point conditioned for finite differences.
    fn check_arch(arch: ArchId, seed: u64) {
        let m = tiny_model(arch, seed);
        let config = m.config.clone();
        let text = vec![2u32, 3, 4, 0];
        let reply = vec![4u32, 2, 0, 0];
        let y = Tensor::from_vec(&[7], vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();

        let mut store = m.params.clone();
        crate::nn::gradcheck::condition_for_fd(&mut store, &RngStream::new(seed ^ 0x5eed));
        let loss = {
            let config = config.clone();
            let (text, reply, y) = (text.clone(), reply.clone(), y.clone());
            move |p: &ParameterStore<f64>| {
                let mut rng = RngStream::new(999);
                let pass = run_forward(&config, p, &text, &reply, Mode::Train, &mut rng)?;
                Ok(bce_loss(&pass.scores, &y)?.0)
            }
        };

        let analytic: BTreeMap<String, Tensor<f64>> = {
            let mut rng = RngStream::new(999);
            let pass =
                run_forward(&config, &store, &text, &reply, Mode::Train, &mut rng).unwrap();
            let (_, dscores) = bce_loss(&pass.scores, &y).unwrap();
            store.zero_grads();
            run_backward(&config, &mut store, &pass, &dscores);
            store.grads_cloned()
        };

        let report = grad_check(&mut store, loss, &analytic, 1e-3).unwrap();
        assert!(
            report.passed(),
            "{arch:?} seed {seed}: failed {:?} worst {}",
            report.failed,
            report.worst()
        );
    }

    #[test]
    fn end_to_end_gradients_arch_a() {
        check_arch(ArchId::A, 31);
    }

    #[test]
    fn end_to_end_gradients_arch_d() {
        check_arch(ArchId::D, 34);
    }

    #[test]
    fn end_to_end_gradients_arch_e() {
        check_arch(ArchId::E, 35);
    }

    #[test]
    fn end_to_end_gradients_arch_b() {
        check_arch(ArchId::B, 32);
    }

    #[test]
    fn end_to_end_gradients_arch_c() {
        check_arch(ArchId::C, 33);
    }

    #[test]
    fn flatten_and_split_are_inverse() {
        let a = Tensor::from_vec(&[2, 2, 2], (0..8).map(|v| v as f64).collect()).unwrap();
        let b = Tensor::from_vec(&[2, 2, 2], (8..16).map(|v| v as f64).collect()).unwrap();
        let flat = flatten_pooled(&[a.clone(), b.clone()]);
        assert_eq!(flat.len(), 16);
        // Row 0 of a, row 0 of b, row 1 of a, row 1 of b.
        assert_eq!(&flat.data()[0..4], &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(&flat.data()[4..8], &[8.0, 9.0, 10.0, 11.0]);
        let parts = split_pooled(flat.data(), 2, [2, 2, 2]);
        assert_eq!(parts[0].data(), a.data());
        assert_eq!(parts[1].data(), b.data());
    }
}
