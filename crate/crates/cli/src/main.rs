use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod eval;
mod misc;
mod post;
mod synth;
mod util;

/// Evaluate, clean up and synthesize text-segmentation masks for comics.
///
/// Log verbosity comes from the MANGASEG_LOG variable (error, warn, info,
/// debug, trace); the default is warn.
#[derive(Parser, Debug)]
#[command(name = "mangaseg", version)]
struct Cli {
    /// Worker threads; defaults to one per core. Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score predicted masks against ground truth.
    Eval(eval::EvalArgs),
    /// Drop small isolated components.
    Denoise(post::DenoiseArgs),
    /// Grow partial detections to whole strokes of the page.
    Expand(post::ExpandArgs),
    /// Overlay random text on artwork and save image, mask and manifest.
    Synth(synth::SynthArgs),
    /// Loss values of a probability map.
    Loss(misc::LossArgs),
    /// Histogram of per-component F1 from eval reports.
    Histogram(misc::HistogramArgs),
    /// Wrap text into a box with a font.
    Wrap(misc::WrapArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MANGASEG_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => eval::run(a, cli.jobs),
        Command::Denoise(a) => post::denoise(a, cli.jobs),
        Command::Expand(a) => post::expand(a, cli.jobs),
        Command::Synth(a) => synth::run(a, cli.jobs),
        Command::Loss(a) => misc::loss(a),
        Command::Histogram(a) => misc::histogram(a),
        Command::Wrap(a) => misc::wrap(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<mangaseg::Error>() {
                Some(mangaseg::Error::Usage(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
