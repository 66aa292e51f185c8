//! Normalization-table flags shared by `train` and `predict`.
//!
//! The built-in emoticon/emoji/contraction tables can each be replaced by
//! a TSV file. Predictions must be produced with the same tables the model
//! was trained with; the manifests record the file digests so a mismatch
//! is at least diagnosable.

use std::path::PathBuf;

use gifrec_core::text::{
    default_contractions, default_emojis, default_smileys, Cleaner, ReplacementTable,
};
use gifrec_core::{Error, Result};

use crate::manifest::RunManifest;

#[derive(Debug, Clone, clap::Args)]
pub struct CleanerArgs {
    /// TSV file (pattern<TAB>replacement) overriding the built-in emoticon table.
    #[arg(long, value_name = "PATH")]
    pub smileys: Option<PathBuf>,

    /// TSV file overriding the built-in emoji table.
    #[arg(long, value_name = "PATH")]
    pub emojis: Option<PathBuf>,

    /// TSV file overriding the built-in contraction table.
    #[arg(long, value_name = "PATH")]
    pub contractions: Option<PathBuf>,

    /// Drop whole hashtags instead of keeping the tag word.
    #[arg(long)]
    pub strict_hashtags: bool,
}

enum TableSource {
    Builtin(&'static ReplacementTable),
    Loaded(ReplacementTable),
}

impl TableSource {
    fn table(&self) -> &ReplacementTable {
        match self {
            TableSource::Builtin(t) => t,
            TableSource::Loaded(t) => t,
        }
    }
}

pub struct Tables {
    smileys: TableSource,
    emojis: TableSource,
    contractions: TableSource,
    strict_hashtags: bool,
}

impl Tables {
    pub fn load(args: &CleanerArgs, manifest: &mut RunManifest) -> Result<Tables> {
        let mut load = |path: &Option<PathBuf>,
                        builtin: &'static ReplacementTable|
         -> Result<TableSource> {
            match path {
                None => Ok(TableSource::Builtin(builtin)),
                Some(p) => {
                    manifest.record_input(p)?;
                    let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                    Ok(TableSource::Loaded(ReplacementTable::from_tsv(
                        &text,
                        &p.display().to_string(),
                    )?))
                }
            }
        };
        Ok(Tables {
            smileys: load(&args.smileys, default_smileys())?,
            emojis: load(&args.emojis, default_emojis())?,
            contractions: load(&args.contractions, default_contractions())?,
            strict_hashtags: args.strict_hashtags,
        })
    }

    pub fn cleaner(&self) -> Cleaner<'_> {
        Cleaner {
            smileys: self.smileys.table(),
            emojis: self.emojis.table(),
            contractions: self.contractions.table(),
            strict_hashtags: self.strict_hashtags,
        }
    }
}
