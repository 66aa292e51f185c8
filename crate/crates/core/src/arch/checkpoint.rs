//! Binary model checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic            8 bytes  "GRCKPT01"
//! scalar width     u8       4 (f32) or 8 (f64)
//! architecture     u8       ASCII 'A'..'E'
//! config           u32 length + JSON bytes
//! inventory hash   32 bytes (sha-256 of the category list; names are not stored)
//! vocabulary       u32 word count, then per word: u32 length + UTF-8 bytes
//!                  (words in id order starting at 2; padding and OOV are implicit)
//! tensors          u32 count, then per tensor, in sorted name order:
//!                  u32 name length + name, u8 ndim, u32 per dim, raw values
//! ```
//!
//! Writing is deterministic: the same model always produces the same bytes.
//! Loading verifies the tensor set exactly against the parameter listing
//! derived from the stored config, so a truncated or tampered file fails
//! loudly instead of producing a half-initialized model.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::params::ParameterStore;
use crate::nn::tensor::Tensor;
use crate::scalar::Scalar;
use crate::text::Vocabulary;

use super::config::{ArchId, ModelConfig};
use super::model::{parameter_shapes, Model};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"GRCKPT01";

/// Upper bound on any single length field; a corrupted file should fail
/// with a clear error, not an allocation of several gigabytes.
const MAX_FIELD_LEN: u32 = 1 << 30;

pub fn save_model<S: Scalar>(model: &Model<S>, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.push(S::WIDTH);
    buf.push(model.config.arch.as_byte());

    let config = serde_json::to_vec(&model.config)
        .map_err(|e| Error::Checkpoint(format!("config serialization: {e}")))?;
    push_u32(&mut buf, config.len());
    buf.extend_from_slice(&config);

    buf.extend_from_slice(&model.inventory_hash);

    push_u32(&mut buf, model.vocab.words().len());
    for word in model.vocab.words() {
        push_u32(&mut buf, word.len());
        buf.extend_from_slice(word.as_bytes());
    }

    push_u32(&mut buf, model.params.len());
    for (name, tensor) in model.params.iter() {
        push_u32(&mut buf, name.len());
        buf.extend_from_slice(name.as_bytes());
        buf.push(tensor.shape().len() as u8);
        for &dim in tensor.shape() {
            push_u32(&mut buf, dim);
        }
        for &v in tensor.data() {
            v.write_le(&mut buf);
        }
    }

    fs::write(path, &buf).map_err(|e| Error::io(path, e))
}

pub fn load_model<S: Scalar>(path: &Path) -> Result<Model<S>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = Reader { buf: &bytes, pos: 0 };

    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic, not a model checkpoint".into()));
    }
    let width = r.u8()?;
    if width != S::WIDTH {
        return Err(Error::Checkpoint(format!(
            "scalar width {width} does not match the expected width {}",
            S::WIDTH
        )));
    }
    let arch_byte = r.u8()?;
    let arch = ArchId::from_byte(arch_byte)?;

    let config_len = r.u32_len("config")?;
    let config_bytes = r.take(config_len)?;
    let config: ModelConfig = serde_json::from_slice(config_bytes)
        .map_err(|e| Error::Checkpoint(format!("config JSON: {e}")))?;
    if config.arch != arch {
        return Err(Error::Checkpoint(format!(
            "architecture byte {:?} contradicts the stored config ({})",
            arch_byte as char, config.arch
        )));
    }
    config.validate()?;

    let mut inventory_hash = [0u8; 32];
    inventory_hash.copy_from_slice(r.take(32)?);

    let word_count = r.u32_len("vocabulary")?;
    let mut words = Vec::with_capacity(word_count);
    for _ in 0..word_count {
        words.push(r.string("vocabulary word")?);
    }
    let vocab = Vocabulary::from_words(words);

    let tensor_count = r.u32_len("tensor table")?;
    let mut tensors: BTreeMap<String, Tensor<S>> = BTreeMap::new();
    for _ in 0..tensor_count {
        let name = r.string("tensor name")?;
        let ndim = r.u8()? as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(r.u32_len("tensor dimension")?);
        }
        let volume = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .and_then(|v| v.checked_mul(S::WIDTH as usize))
            .ok_or_else(|| Error::Checkpoint(format!("implausible shape for tensor {name}")))?;
        let raw = r.take(volume)?;
        let data: Vec<S> = raw
            .chunks_exact(S::WIDTH as usize)
            .map(S::read_le)
            .collect();
        let tensor = Tensor::from_vec(&shape, data)
            .map_err(|e| Error::Checkpoint(format!("tensor {name}: {e}")))?;
        if tensors.insert(name.clone(), tensor).is_some() {
            return Err(Error::Checkpoint(format!("duplicate tensor {name}")));
        }
    }
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes after the tensor table",
            bytes.len() - r.pos
        )));
    }

    let mut params = ParameterStore::new();
    for (name, shape) in parameter_shapes(&config, vocab.table_rows()) {
        let tensor = tensors
            .remove(&name)
            .ok_or_else(|| Error::Checkpoint(format!("missing tensor {name}")))?;
        if tensor.shape() != shape.as_slice() {
            return Err(Error::Checkpoint(format!(
                "tensor {name} has shape {:?}, expected {shape:?}",
                tensor.shape()
            )));
        }
        params.insert(&name, tensor);
    }
    if let Some(name) = tensors.keys().next() {
        return Err(Error::Checkpoint(format!("unexpected tensor {name}")));
    }

    Ok(Model {
        config,
        params,
        vocab,
        inventory_hash,
    })
}

fn push_u32(buf: &mut Vec<u8>, n: usize) {
    buf.extend_from_slice(&u32::try_from(n).expect("field fits in u32").to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Checkpoint("unexpected end of file".into()));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    /// A u32 length field, bounds-checked and widened to usize.
    fn u32_len(&mut self, what: &str) -> Result<usize> {
        let n = self.u32()?;
        if n > MAX_FIELD_LEN {
            return Err(Error::Checkpoint(format!("implausible {what} length {n}")));
        }
        Ok(n as usize)
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let len = self.u32_len(what)?;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::Checkpoint(format!("{what} is not valid UTF-8")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::model::build_model;
    use crate::corpus::CategoryInventory;

    fn fixture() -> Model<f32> {
        let mut config = ModelConfig::defaults(ArchId::C, 77);
        config.embed_dim = 4;
        config.rnn_units = 2;
        config.dense_units = 3;
        config.n_outputs = 5;
        config.len_text = 4;
        config.len_reply = 2;
        let vocab = Vocabulary::from_words(vec!["left".into(), "right".into()]);
        let inventory =
            CategoryInventory::from_names((0..5).map(|i| format!("c{i}")).collect()).unwrap();
        build_model(config, vocab, &inventory, None).unwrap()
    }

    #[test]
    fn roundtrip_preserves_everything() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_model(&model, &path).unwrap();

        let loaded: Model<f32> = load_model(&path).unwrap();
        assert_eq!(loaded.config, model.config);
        assert_eq!(loaded.inventory_hash, model.inventory_hash);
        assert_eq!(loaded.vocab.words(), model.vocab.words());
        assert_eq!(loaded.params.len(), model.params.len());
        for (name, t) in model.params.iter() {
            assert_eq!(loaded.params.get(name).shape(), t.shape(), "{name}");
            assert_eq!(loaded.params.get(name).data(), t.data(), "{name}");
        }
        // And the loaded model scores identically.
        let a = model.infer(&[2, 3, 0, 0], &[3, 0]).unwrap();
        let b = loaded.infer(&[2, 3, 0, 0], &[3, 0]).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn writing_is_deterministic() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.ckpt"), dir.path().join("b.ckpt"));
        save_model(&model, &p1).unwrap();
        save_model(&model, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn scalar_width_mismatch_is_rejected() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_model(&model, &path).unwrap();
        let err = load_model::<f64>(&path).unwrap_err().to_string();
        assert!(err.contains("width 4"), "{err}");
    }

    #[test]
    fn bad_magic_is_rejected() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_model(&model, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        let err = load_model::<f32>(&path).unwrap_err().to_string();
        assert!(err.contains("magic"), "{err}");
    }

    #[test]
    fn truncation_is_rejected() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_model(&model, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 7]).unwrap();
        let err = load_model::<f32>(&path).unwrap_err().to_string();
        assert!(err.contains("end of file"), "{err}");
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_model(&model, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.extend_from_slice(b"junk");
        fs::write(&path, &bytes).unwrap();
        let err = load_model::<f32>(&path).unwrap_err().to_string();
        assert!(err.contains("trailing"), "{err}");
    }

    #[test]
    fn arch_byte_must_match_config() {
        let model = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_model(&model, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[9] = b'A'; // stored config says C
        fs::write(&path, &bytes).unwrap();
        let err = load_model::<f32>(&path).unwrap_err().to_string();
        assert!(err.contains("contradicts"), "{err}");
    }
}
