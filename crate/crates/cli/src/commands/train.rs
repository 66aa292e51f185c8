use std::fs;
use std::path::PathBuf;

use serde_json::json;

use gifrec_core::arch::{build_model, save_model, ArchId, ModelConfig};
use gifrec_core::corpus::{load_dataset, load_embeddings, CategoryInventory, Dataset, Instance};
use gifrec_core::text::{tokenize, Vocabulary};
use gifrec_core::train::{
    best_index, encode_dataset, grid_seed, load_grid, split_indices, train, EncodedExample,
    TrainConfig, TrainReport,
};
use gifrec_core::{Error, Result, TrainScalar};

use crate::manifest::RunManifest;
use crate::tables::{CleanerArgs, Tables};

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    /// Architecture: A (BiGRU), B (2-D CNN grid), C (CNN + BiLSTM),
    /// D (stacked BiGRU) or E (BiLSTM).
    #[arg(long)]
    pub arch: ArchId,

    /// Labeled JSON-lines corpus.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Category inventory, one name per line.
    #[arg(long, value_name = "PATH")]
    pub inventory: PathBuf,

    /// Pretrained word vectors (text format: word then values).
    #[arg(long, value_name = "PATH")]
    pub embeddings: PathBuf,

    /// Validate on this file instead of splitting --data.
    #[arg(long, value_name = "PATH", conflicts_with = "split")]
    pub val_file: Option<PathBuf>,

    /// Train fraction when splitting --data by ratio.
    #[arg(long, default_value_t = 0.8, value_parser = parse_ratio)]
    pub split: f64,

    /// Seed for every random choice of the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory for checkpoint, report and manifest.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// JSON-lines hyperparameter grid; trains every candidate and marks the best.
    #[arg(long, value_name = "PATH")]
    pub grid: Option<PathBuf>,

    // -- model shape (defaults are the publication values) --
    #[arg(long, default_value_t = 300)]
    pub embed_dim: usize,
    #[arg(long, default_value_t = 128)]
    pub rnn_units: usize,
    #[arg(long, default_value_t = 100)]
    pub dense_units: usize,
    #[arg(long, default_value_t = 50)]
    pub len_text: usize,
    #[arg(long, default_value_t = 50)]
    pub len_reply: usize,
    #[arg(long, default_value_t = 20000)]
    pub vocab_size: usize,
    /// Keep only words seen at least this often.
    #[arg(long, default_value_t = 1)]
    pub min_freq: u64,
    /// Do not update the embedding tables during training.
    #[arg(long)]
    pub freeze_embeddings: bool,

    // -- optimization --
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 30)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 3)]
    pub patience: usize,
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,

    #[command(flatten)]
    pub cleaner: CleanerArgs,
}

fn parse_ratio(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if 0.0 < v && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not strictly between 0 and 1"))
    }
}

impl TrainArgs {
    fn model_config(&self, n_outputs: usize) -> ModelConfig {
        let mut c = ModelConfig::defaults(self.arch, self.seed);
        c.embed_dim = self.embed_dim;
        c.rnn_units = self.rnn_units;
        c.dense_units = self.dense_units;
        c.n_outputs = n_outputs;
        c.len_text = self.len_text;
        c.len_reply = self.len_reply;
        c.trainable_embeddings = !self.freeze_embeddings;
        c
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            patience: self.patience,
            lr: self.lr,
            split_ratio: self.split,
            seed: self.seed,
            shuffle_each_epoch: true,
        }
    }
}

pub fn run(args: TrainArgs) -> Result<()> {
    let mut manifest = RunManifest::new("train");
    manifest.seed = Some(args.seed);
    let tables = Tables::load(&args.cleaner, &mut manifest)?;
    let cleaner = tables.cleaner();

    manifest.record_input(&args.inventory)?;
    manifest.record_input(&args.data)?;
    manifest.record_input(&args.embeddings)?;

    let inventory = CategoryInventory::load(&args.inventory)?;
    let (dataset, skipped) = load_dataset(&args.data, &inventory, true)?;
    if skipped > 0 {
        eprintln!(
            "note: skipped {skipped} unlabeled instances in {}",
            args.data.display()
        );
    }

    let (train_insts, val_insts) = match &args.val_file {
        Some(val_path) => {
            manifest.record_input(val_path)?;
            let (val, val_skipped) = load_dataset(val_path, &inventory, true)?;
            if val_skipped > 0 {
                eprintln!(
                    "note: skipped {val_skipped} unlabeled instances in {}",
                    val_path.display()
                );
            }
            (dataset.instances, val.instances)
        }
        None => {
            let (ti, vi) = split_indices(dataset.len(), args.split, args.seed);
            let pick = |ix: &[usize]| -> Vec<Instance> {
                ix.iter().map(|&i| dataset.instances[i].clone()).collect()
            };
            (pick(&ti), pick(&vi))
        }
    };

    // The vocabulary comes from the training half only, so the validation
    // file never influences the model, not even through token ids.
    let docs: Vec<Vec<String>> = train_insts
        .iter()
        .flat_map(|inst| {
            [
                tokenize(&cleaner.clean(&inst.text)),
                tokenize(&cleaner.clean(&inst.reply)),
            ]
        })
        .collect();
    let vocab = Vocabulary::build(docs.iter().map(|d| d.iter()), args.vocab_size, args.min_freq);
    let pretrained = load_embeddings::<TrainScalar>(&args.embeddings, args.embed_dim)?;

    let base_config = args.model_config(inventory.len());
    let train_data = Dataset {
        instances: train_insts,
    };
    let val_data = Dataset {
        instances: val_insts,
    };
    let train_set: Vec<EncodedExample<TrainScalar>> =
        encode_dataset(&train_data, &cleaner, &vocab, &base_config);
    let val_set: Vec<EncodedExample<TrainScalar>> =
        encode_dataset(&val_data, &cleaner, &vocab, &base_config);

    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;

    let fit = |config: ModelConfig,
               tconfig: &TrainConfig,
               dir: &std::path::Path,
               manifest: &mut RunManifest|
     -> Result<TrainReport> {
        let mut model = build_model(config, vocab.clone(), &inventory, Some(&pretrained))?;
        let report = train(&mut model, &train_set, &val_set, tconfig)?;
        let ckpt = dir.join("model.ckpt");
        save_model(&model, &ckpt)?;
        manifest.record_artifact(&ckpt);
        let report_path = dir.join("report.json");
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Data(format!("report serialization: {e}")))?;
        fs::write(&report_path, json + "\n").map_err(|e| Error::io(&report_path, e))?;
        manifest.record_artifact(&report_path);
        Ok(report)
    };

    match &args.grid {
        None => {
            let report = fit(base_config.clone(), &args.train_config(), &args.out, &mut manifest)?;
            eprintln!(
                "best epoch {} with validation recall {:.4}",
                report.best_epoch, report.best_val_recall
            );
            manifest.config = json!({
                "model": base_config,
                "train": args.train_config(),
            });
        }
        Some(grid_path) => {
            manifest.record_input(grid_path)?;
            let points = load_grid(grid_path)?;
            let mut recalls = Vec::with_capacity(points.len());
            for (i, point) in points.iter().enumerate() {
                let dir = args.out.join(format!("grid_{i:03}"));
                fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let seed = grid_seed(args.seed, args.arch, i);
                let mut config = base_config.clone();
                config.rnn_units = point.rnn_units;
                config.dense_units = point.dense_units;
                config.seed = seed;
                let mut tconfig = args.train_config();
                tconfig.lr = point.lr;
                tconfig.seed = seed;
                let report = fit(config, &tconfig, &dir, &mut manifest)?;
                eprintln!(
                    "grid candidate {i}: best epoch {} recall {:.4}",
                    report.best_epoch, report.best_val_recall
                );
                recalls.push(report.best_val_recall);
            }
            let best = best_index(&recalls).expect("grid is non-empty");
            let marker = args.out.join("best.json");
            let body = serde_json::to_string_pretty(&json!({
                "index": best,
                "dir": format!("grid_{best:03}"),
                "val_recall": recalls[best],
            }))
            .expect("marker serialization");
            fs::write(&marker, body + "\n").map_err(|e| Error::io(&marker, e))?;
            manifest.record_artifact(&marker);
            manifest.config = json!({
                "model": base_config,
                "train": args.train_config(),
                "grid": points,
            });
        }
    }

    manifest.write(&args.out.join("manifest.json"))
}
