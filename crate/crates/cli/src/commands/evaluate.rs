use std::collections::HashMap;
use std::path::PathBuf;

use serde_json::json;

use gifrec_core::corpus::{load_gold, read_predictions, Prediction};
use gifrec_core::ensemble::mean_recall;
use gifrec_core::{Error, Result};

use crate::manifest::RunManifest;

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Prediction file to score.
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,

    /// Labeled JSON-lines corpus with the gold categories.
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,

    /// How many leading recommendations count.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,

    /// Manifest path; defaults to a sibling of --pred.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let k = args.k as usize;
    let mut manifest = RunManifest::new("evaluate");
    manifest.record_input(&args.pred)?;
    manifest.record_input(&args.gold)?;

    let preds: HashMap<u64, Prediction> = read_predictions(&args.pred)?
        .into_iter()
        .map(|p| (p.idx, p))
        .collect();
    let gold = load_gold(&args.gold)?;
    if gold.is_empty() {
        return Err(Error::Data(format!(
            "{} holds no labeled instances to score against",
            args.gold.display()
        )));
    }

    let mut recalls = Vec::with_capacity(gold.len());
    for (idx, names) in &gold {
        if names.is_empty() {
            return Err(Error::Data(format!("instance {idx} has no gold labels")));
        }
        let pred = preds
            .get(idx)
            .ok_or_else(|| Error::Data(format!("no prediction for instance {idx}")))?;
        let take = k.min(pred.categories.len());
        let hits = pred.categories[..take]
            .iter()
            .filter(|c| names.contains(c.as_str()))
            .count();
        recalls.push(hits as f64 / names.len() as f64);
    }
    let mr = mean_recall(recalls).expect("gold is non-empty");
    println!("{mr:.4}");

    manifest.config = json!({ "k": args.k });
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.eval-manifest.json", args.pred.display())));
    manifest.write(&manifest_path)
}
