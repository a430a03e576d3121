use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use image::DynamicImage;
use log::{info, warn};
use mangaseg::io::{encode_binary, open_image, SynthManifest};
use mangaseg::synth::{textify, CodepointPool, FontAsset, TextifyConfig};
use mangaseg::Error;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::util::{ensure_dir, list_files, png_bytes, stem, thread_pool, write_atomic, IMAGE_EXTENSIONS};

pub const FONT_EXTENSIONS: &[&str] = &["ttf", "otf"];

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Directory of clean artwork.
    #[arg(long)]
    pub images: PathBuf,
    /// Directory of TrueType/OpenType fonts.
    #[arg(long)]
    pub fonts: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of pairs; sources are used round-robin in name order.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Pair k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON file overriding styling probabilities and ranges.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn load_fonts(dir: &std::path::Path) -> Result<Vec<FontAsset>> {
    let pool = CodepointPool::default();
    let paths = list_files(dir, FONT_EXTENSIONS)?;
    let loaded: Vec<Result<FontAsset>> = paths
        .par_iter()
        .map(|p| FontAsset::load(p, &pool).with_context(|| format!("loading {}", p.display())))
        .collect();
    let mut fonts = Vec::new();
    for f in loaded {
        match f {
            Ok(f) if f.supported().is_empty() => warn!("{} draws none of the codepoint pool", f.id()),
            Ok(f) => {
                info!("{}: {} codepoints", f.id(), f.supported().len());
                fonts.push(f);
            }
            Err(e) => warn!("{e:#}"),
        }
    }
    if fonts.is_empty() {
        bail!(Error::Config(format!("no usable font in {}", dir.display())));
    }
    Ok(fonts)
}

pub fn run(args: &SynthArgs, jobs: Option<usize>) -> Result<ExitCode> {
    let config: TextifyConfig = match &args.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?).context("parsing textify config")?,
        None => TextifyConfig::default(),
    };
    config.validate()?;
    let sources = list_files(&args.images, IMAGE_EXTENSIONS)?;
    if sources.is_empty() {
        bail!(Error::Usage(format!("no images in {}", args.images.display())));
    }
    let pool = thread_pool(jobs)?;
    let fonts = pool.install(|| load_fonts(&args.fonts))?;
    let font_ids: Vec<String> = fonts.iter().map(|f| f.id().to_string()).collect();
    ensure_dir(&args.out)?;

    let results: Vec<Result<()>> = pool.install(|| {
        (0..args.count)
            .into_par_iter()
            .map(|k| {
                let source = &sources[(k % sources.len() as u64) as usize];
                let seed = args.seed.wrapping_add(k);
                let name = format!("{}_{seed}", stem(source));
                let img = open_image(source)?.to_rgb8();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let out = textify(&img, &fonts, &config, &mut rng).with_context(|| name.clone())?;
                let manifest = SynthManifest::new(
                    source.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                    seed,
                    img.width(),
                    img.height(),
                    font_ids.clone(),
                    out.record,
                );
                write_atomic(&args.out.join(format!("{name}.png")), &png_bytes(&DynamicImage::ImageRgb8(out.image))?)?;
                write_atomic(
                    &args.out.join(format!("{name}.mask.png")),
                    &png_bytes(&DynamicImage::ImageLuma8(encode_binary(&out.mask)))?,
                )?;
                write_atomic(
                    &args.out.join(format!("{name}.manifest.json")),
                    serde_json::to_string_pretty(&manifest)?.as_bytes(),
                )?;
                Ok(())
            })
            .collect()
    });
    let failures: Vec<_> = results.into_iter().filter_map(Result::err).collect();
    if failures.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for e in &failures {
        eprintln!("  {e:#}");
    }
    Ok(ExitCode::FAILURE)
}
