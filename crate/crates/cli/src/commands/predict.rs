use std::path::PathBuf;

use gifrec_core::arch::load_model;
use gifrec_core::corpus::{load_dataset, write_predictions, CategoryInventory, Prediction};
use gifrec_core::ensemble::top_k_indices;
use gifrec_core::train::{encode_pair, N_RECOMMENDED};
use gifrec_core::{Error, Result, Scalar, TrainScalar};

use crate::commands::sibling_manifest;
use crate::manifest::RunManifest;
use crate::tables::{CleanerArgs, Tables};

#[derive(Debug, clap::Args)]
pub struct PredictArgs {
    /// Trained model checkpoint.
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,

    /// JSON-lines corpus to score; labels are ignored if present.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Where to write the predictions (JSON lines).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,

    /// Category inventory the model was trained against.
    #[arg(long, value_name = "PATH")]
    pub inventory: PathBuf,

    #[command(flatten)]
    pub cleaner: CleanerArgs,
}

pub fn run(args: PredictArgs) -> Result<()> {
    let mut manifest = RunManifest::new("predict");
    let tables = Tables::load(&args.cleaner, &mut manifest)?;
    let cleaner = tables.cleaner();

    manifest.record_input(&args.model)?;
    manifest.record_input(&args.inventory)?;
    manifest.record_input(&args.data)?;

    let model = load_model::<TrainScalar>(&args.model)?;
    let inventory = CategoryInventory::load(&args.inventory)?;
    if inventory.hash() != &model.inventory_hash {
        return Err(Error::Data(format!(
            "inventory {} does not match the one the checkpoint was trained against",
            args.inventory.display()
        )));
    }

    let (dataset, _) = load_dataset(&args.data, &inventory, false)?;
    let mut preds = Vec::with_capacity(dataset.len());
    for inst in &dataset.instances {
        let (text_ids, reply_ids) = encode_pair(
            &cleaner,
            &model.vocab,
            &inst.text,
            &inst.reply,
            model.config.len_text,
            model.config.len_reply,
        );
        let scores = model.infer(&text_ids, &reply_ids)?;
        let top = top_k_indices(scores.data(), N_RECOMMENDED);
        preds.push(Prediction {
            idx: inst.idx,
            categories: top.iter().map(|&i| inventory.name(i).to_string()).collect(),
            scores: top.iter().map(|&i| scores.data()[i].to_f64()).collect(),
        });
    }
    write_predictions(&args.out, &preds)?;
    manifest.record_artifact(&args.out);

    manifest.seed = Some(model.config.seed);
    manifest.config = serde_json::to_value(&model.config)
        .map_err(|e| Error::Data(format!("config serialization: {e}")))?;
    manifest.write(&sibling_manifest(&args.out))
}
