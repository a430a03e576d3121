use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;
use image::DynamicImage;
use mangaseg::io::{decode_prediction, encode_binary, open_image};
use mangaseg::postprocess::{expand_partial, remove_noise, ExpandParams, NoiseParams};
use mangaseg::Error;
use rayon::prelude::*;

use crate::util::{ensure_dir, expand_inputs, images_by_stem, png_bytes, stem, thread_pool, write_atomic, IMAGE_EXTENSIONS};

#[derive(Args, Debug)]
pub struct DenoiseArgs {
    /// Mask files or directories of masks.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Components at least this large are always kept [default: 100].
    #[arg(long)]
    pub good_area: Option<usize>,
    /// How many neighbours in label order may vouch for a component [default: 15].
    #[arg(long)]
    pub index_window: Option<usize>,
    /// Extra vertical distance allowed between centers [default: 10].
    #[arg(long)]
    pub y_slack: Option<f64>,
    /// Extra horizontal distance allowed between centers [default: 20].
    #[arg(long)]
    pub x_slack: Option<f64>,
    #[arg(long, value_name = "D")]
    pub fuzzy_palette: Option<u8>,
}

impl DenoiseArgs {
    pub fn params(&self) -> NoiseParams {
        let d = NoiseParams::default();
        NoiseParams {
            good_area: self.good_area.unwrap_or(d.good_area),
            index_window: self.index_window.unwrap_or(d.index_window),
            y_slack: self.y_slack.unwrap_or(d.y_slack),
            x_slack: self.x_slack.unwrap_or(d.x_slack),
        }
    }
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    /// Mask files or directories of masks.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Directory of page images, matched to masks by file stem.
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep the input mask in the output.
    #[arg(long)]
    pub union: bool,
    /// Adaptive threshold window, odd [default: 15].
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Adaptive threshold offset [default: 30].
    #[arg(long)]
    pub offset_c: Option<f64>,
    /// Boxes with this many components or more are skipped [default: 10].
    #[arg(long)]
    pub max_components: Option<usize>,
    /// Components this small or smaller are never painted [default: 3].
    #[arg(long)]
    pub min_area: Option<usize>,
    /// Fraction of a component the mask must hit [default: 0.1].
    #[arg(long)]
    pub min_overlap: Option<f64>,
    #[arg(long, value_name = "D")]
    pub fuzzy_palette: Option<u8>,
}

impl ExpandArgs {
    pub fn params(&self) -> ExpandParams {
        let d = ExpandParams::default();
        ExpandParams {
            block_size: self.block_size.unwrap_or(d.block_size),
            offset_c: self.offset_c.unwrap_or(d.offset_c),
            max_components: self.max_components.unwrap_or(d.max_components),
            min_area: self.min_area.unwrap_or(d.min_area),
            min_overlap_frac: self.min_overlap.unwrap_or(d.min_overlap_frac),
        }
    }
}

fn report(results: Vec<(PathBuf, Result<()>)>) -> ExitCode {
    let failures: Vec<_> = results.into_iter().filter_map(|(p, r)| r.err().map(|e| (p, e))).collect();
    if failures.is_empty() {
        return ExitCode::SUCCESS;
    }
    eprintln!("{} files failed:", failures.len());
    for (p, e) in failures {
        eprintln!("  {}: {e:#}", p.display());
    }
    ExitCode::FAILURE
}

fn write_mask(out: &Path, input: &Path, mask: &mangaseg::BinaryMask) -> Result<()> {
    let bytes = png_bytes(&DynamicImage::ImageLuma8(encode_binary(mask)))?;
    write_atomic(&out.join(format!("{}.png", stem(input))), &bytes)
}

pub fn denoise(args: &DenoiseArgs, jobs: Option<usize>) -> Result<ExitCode> {
    let params = args.params();
    params.validate()?;
    let inputs = expand_inputs(&args.inputs, IMAGE_EXTENSIONS)?;
    ensure_dir(&args.out)?;
    let results = thread_pool(jobs)?.install(|| {
        inputs
            .par_iter()
            .map(|p| {
                let r = (|| {
                    let mask = decode_prediction(&open_image(p)?, args.fuzzy_palette)?;
                    write_mask(&args.out, p, &remove_noise(&mask, &params)?)
                })();
                (p.clone(), r)
            })
            .collect()
    });
    Ok(report(results))
}

pub fn expand(args: &ExpandArgs, jobs: Option<usize>) -> Result<ExitCode> {
    let params = args.params();
    params.validate()?;
    let inputs = expand_inputs(&args.inputs, IMAGE_EXTENSIONS)?;
    let pages = images_by_stem(&args.images)?;
    ensure_dir(&args.out)?;
    let results = thread_pool(jobs)?.install(|| {
        inputs
            .par_iter()
            .map(|p| {
                let r = (|| {
                    let page = pages
                        .get(&stem(p))
                        .ok_or_else(|| Error::Usage(format!("no page image for {}", stem(p))))?;
                    let gray = open_image(page)?.to_luma8();
                    let mask = decode_prediction(&open_image(p)?, args.fuzzy_palette)?;
                    let mut grown = expand_partial(&gray, &mask, &params).context("expanding")?;
                    if args.union {
                        grown = grown.or(&mask)?;
                    }
                    write_mask(&args.out, p, &grown)
                })();
                (p.clone(), r)
            })
            .collect()
    });
    Ok(report(results))
}
