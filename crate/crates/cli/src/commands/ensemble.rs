use std::path::PathBuf;

use serde_json::json;

use gifrec_core::corpus::{read_predictions, write_predictions, CategoryInventory};
use gifrec_core::ensemble::ensemble_predictions;
use gifrec_core::train::N_RECOMMENDED;
use gifrec_core::Result;

use crate::commands::sibling_manifest;
use crate::manifest::RunManifest;

#[derive(Debug, clap::Args)]
pub struct EnsembleArgs {
    /// Member prediction files to vote over (the usual committee has five).
    #[arg(long, num_args = 1.., value_name = "PATH")]
    pub members: Vec<PathBuf>,

    /// Where to write the combined predictions.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,

    /// Category inventory; its order breaks voting ties.
    #[arg(long, value_name = "PATH")]
    pub inventory: PathBuf,

    /// Accept a committee of any size instead of exactly five members.
    #[arg(long)]
    pub allow_any_members: bool,
}

pub fn run(args: EnsembleArgs) -> Result<()> {
    let mut manifest = RunManifest::new("ensemble");
    manifest.record_input(&args.inventory)?;
    let inventory = CategoryInventory::load(&args.inventory)?;

    let mut members = Vec::with_capacity(args.members.len());
    for path in &args.members {
        manifest.record_input(path)?;
        members.push(read_predictions(path)?);
    }

    let combined = ensemble_predictions(&members, &inventory, N_RECOMMENDED)?;
    write_predictions(&args.out, &combined)?;
    manifest.record_artifact(&args.out);

    manifest.config = json!({ "members": args.members.len(), "k": N_RECOMMENDED });
    manifest.write(&sibling_manifest(&args.out))
}
