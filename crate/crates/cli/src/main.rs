//! `gifrec` — train, predict, ensemble and evaluate GIF-category
//! recommenders from the command line.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 data/format errors,
//! 4 numeric abort during training.

use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use gifrec_core::Error;

mod commands;
mod manifest;
mod tables;

#[derive(Parser)]
#[command(
    name = "gifrec",
    version,
    about = "GIF reaction category recommendation for tweet/reply pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one architecture (or a hyperparameter grid) on a labeled corpus.
    Train(commands::train::TrainArgs),
    /// Score a dataset with a trained checkpoint and emit top-6 predictions.
    Predict(commands::predict::PredictArgs),
    /// Majority-vote five member prediction files into a final submission.
    Ensemble(commands::ensemble::EnsembleArgs),
    /// Mean recall@k of a prediction file against gold labels.
    Evaluate(commands::evaluate::EvaluateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Command::Ensemble(args) = &cli.command {
        if !args.allow_any_members && args.members.len() != 5 {
            Cli::command()
                .error(
                    clap::error::ErrorKind::WrongNumberOfValues,
                    format!(
                        "--members requires exactly 5 prediction files, got {}; \
                         pass --allow-any-members to lift the requirement",
                        args.members.len()
                    ),
                )
                .exit();
        }
    }

    let result = match cli.command {
        Command::Train(args) => commands::train::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Ensemble(args) => commands::ensemble::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Numeric(_) => 4,
                _ => 3,
            })
        }
    }
}
