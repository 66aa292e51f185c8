//! Model hyperparameter configuration shared by all five architectures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five dual-input architectures.
///
/// * `A` — bidirectional GRU with additive attention.
/// * `B` — four parallel square-kernel 2-D convolutions over the embedding
///   grid, pooled and flattened (no attention).
/// * `C` — three parallel 1-D convolutions summed, pooled, then a
///   bidirectional LSTM with attention.
/// * `D` — two stacked bidirectional GRUs with attention.
/// * `E` — bidirectional LSTM with attention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArchId {
    A,
    B,
    C,
    D,
    E,
}

impl ArchId {
    pub const ALL: [ArchId; 5] = [ArchId::A, ArchId::B, ArchId::C, ArchId::D, ArchId::E];

    pub fn as_byte(self) -> u8 {
        match self {
            ArchId::A => b'A',
            ArchId::B => b'B',
            ArchId::C => b'C',
            ArchId::D => b'D',
            ArchId::E => b'E',
        }
    }

    pub fn from_byte(b: u8) -> Result<ArchId> {
        match b {
            b'A' => Ok(ArchId::A),
            b'B' => Ok(ArchId::B),
            b'C' => Ok(ArchId::C),
            b'D' => Ok(ArchId::D),
            b'E' => Ok(ArchId::E),
            other => Err(Error::Checkpoint(format!(
                "unknown architecture id byte 0x{other:02x}"
            ))),
        }
    }

    /// True for the architectures whose branch ends in attention+dropout.
    pub fn uses_attention(self) -> bool {
        !matches!(self, ArchId::B)
    }
}

impl std::fmt::Display for ArchId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArchId::A => "A",
            ArchId::B => "B",
            ArchId::C => "C",
            ArchId::D => "D",
            ArchId::E => "E",
        })
    }
}

impl std::str::FromStr for ArchId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ArchId> {
        match s {
            "A" | "a" => Ok(ArchId::A),
            "B" | "b" => Ok(ArchId::B),
            "C" | "c" => Ok(ArchId::C),
            "D" | "d" => Ok(ArchId::D),
            "E" | "e" => Ok(ArchId::E),
            other => Err(Error::Config(format!(
                "unknown architecture {other:?}, expected A-E"
            ))),
        }
    }
}

/// Everything needed to rebuild a model's parameter shapes. Serialized
/// into checkpoints, so changing field names breaks format compatibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub arch: ArchId,
    pub embed_dim: usize,
    pub rnn_units: usize,
    pub dense_units: usize,
    pub n_outputs: usize,
    pub branch_dropout: f64,
    pub head_dropout: f64,
    pub spatial_dropout: f64,
    pub conv2d_filters: usize,
    pub conv2d_kernels: Vec<usize>,
    pub conv1d_filters: usize,
    pub conv1d_kernels: Vec<usize>,
    pub len_text: usize,
    pub len_reply: usize,
    pub trainable_embeddings: bool,
    pub seed: u64,
}

impl ModelConfig {
    /// Publication defaults: 300-dim embeddings, 128 recurrent units,
    /// 100-unit head, 43 outputs, sequences of 50 tokens.
    pub fn defaults(arch: ArchId, seed: u64) -> ModelConfig {
        ModelConfig {
            arch,
            embed_dim: 300,
            rnn_units: 128,
            dense_units: 100,
            n_outputs: 43,
            branch_dropout: 0.25,
            head_dropout: 0.25,
            spatial_dropout: 0.40,
            conv2d_filters: 32,
            conv2d_kernels: vec![1, 2, 3, 5],
            conv1d_filters: 100,
            conv1d_kernels: vec![2, 3, 4],
            len_text: 50,
            len_reply: 50,
            trainable_embeddings: true,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        if self.embed_dim == 0 || self.rnn_units == 0 || self.dense_units == 0 {
            return err("embed_dim, rnn_units and dense_units must be positive".into());
        }
        if self.n_outputs == 0 {
            return err("n_outputs must be positive".into());
        }
        if self.len_text == 0 || self.len_reply == 0 {
            return err("sequence lengths must be positive".into());
        }
        for (name, rate) in [
            ("branch_dropout", self.branch_dropout),
            ("head_dropout", self.head_dropout),
            ("spatial_dropout", self.spatial_dropout),
        ] {
            if !(0.0..1.0).contains(&rate) {
                return err(format!("{name} must be in [0, 1), got {rate}"));
            }
        }
        if self.conv2d_kernels != [1, 2, 3, 5] || self.conv2d_filters != 32 {
            return err("the 2-D convolution stage is fixed at 32 filters with kernels 1,2,3,5".into());
        }
        if self.conv1d_kernels != [2, 3, 4] || self.conv1d_filters != 100 {
            return err("the 1-D convolution stage is fixed at 100 filters with kernels 2,3,4".into());
        }
        match self.arch {
            // 2x2 pooling needs at least one full window in each dimension.
            ArchId::B if self.len_text < 2 || self.len_reply < 2 || self.embed_dim < 2 => {
                err("architecture B needs sequence lengths and embed_dim of at least 2".into())
            }
            // 1-D pooling with window 2 over the summed conv outputs.
            ArchId::C if self.len_text < 2 || self.len_reply < 2 => {
                err("architecture C needs sequence lengths of at least 2".into())
            }
            _ => Ok(()),
        }
    }

    /// Width of one branch's feature vector for a branch of length `len`.
    pub fn branch_feature_dim(&self, len: usize) -> usize {
        match self.arch {
            ArchId::A | ArchId::C | ArchId::D | ArchId::E => 2 * self.rnn_units,
            ArchId::B => {
                (len / 2) * (self.conv2d_kernels.len() * (self.embed_dim / 2)) * self.conv2d_filters
            }
        }
    }

    /// Width of the concatenated head input.
    pub fn head_input_dim(&self) -> usize {
        self.branch_feature_dim(self.len_text) + self.branch_feature_dim(self.len_reply)
    }

    /// Closed-form parameter count given the embedding table height
    /// (vocabulary words + the two reserved rows).
    pub fn param_count(&self, table_rows: usize) -> usize {
        let e = self.embed_dim;
        let u = self.rnn_units;
        let gru = |d: usize| 3 * (d * u + u * u + u);
        let lstm = |d: usize| 4 * (d * u + u * u + u);
        let attention = {
            let d = 2 * u;
            d * d + d + d
        };
        let per_branch = match self.arch {
            ArchId::A => 2 * gru(e) + attention,
            ArchId::B => self
                .conv2d_kernels
                .iter()
                .map(|&k| self.conv2d_filters * k * k + self.conv2d_filters)
                .sum::<usize>(),
            ArchId::C => {
                let convs: usize = self
                    .conv1d_kernels
                    .iter()
                    .map(|&k| self.conv1d_filters * k * e + self.conv1d_filters)
                    .sum();
                convs + 2 * lstm(self.conv1d_filters) + attention
            }
            ArchId::D => 2 * gru(e) + 2 * gru(2 * u) + attention,
            ArchId::E => 2 * lstm(e) + attention,
        };
        let head = self.head_input_dim() * self.dense_units
            + self.dense_units
            + self.dense_units * self.n_outputs
            + self.n_outputs;
        2 * table_rows * e + 2 * per_branch + head
    }
}
