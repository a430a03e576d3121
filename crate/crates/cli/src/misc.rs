use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use log::debug;
use mangaseg::io::{decode_ground_truth, decode_prob, histogram_csv, histogram_svg, open_image};
use mangaseg::loss::{bce, dice_coefficient, focal_loss, mix_loss, DEFAULT_SMOOTH};
use mangaseg::metrics::{f1_histogram, MetricsReport};
use mangaseg::synth::{text_wrap_exact, text_wrap_fast, CodepointPool, CountingMeasurer, FontAsset};
use mangaseg::Error;
use serde_json::json;

use crate::util::{expand_inputs, write_atomic};

#[derive(Args, Debug)]
pub struct LossArgs {
    /// Probability map as an 8-bit grayscale image (value / 255).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground truth; easy and hard text both count as positive.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, value_name = "D")]
    pub fuzzy_palette: Option<u8>,
}

pub fn loss(args: &LossArgs) -> Result<ExitCode> {
    let p = decode_prob(&open_image(&args.pred)?)?;
    let gt = decode_ground_truth(&open_image(&args.gt)?, args.fuzzy_palette)?.text_mask();
    let out = json!({
        "dice": dice_coefficient(&p, &gt, DEFAULT_SMOOTH)?,
        "focal": focal_loss(&p, &gt, args.gamma)?,
        "bce": bce(&p, &gt)?,
        "mix": mix_loss(&p, &gt, args.alpha, args.gamma)?,
        "alpha": args.alpha,
        "gamma": args.gamma,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub struct HistogramArgs {
    /// Report files or directories holding them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Also draw the counts as an SVG bar chart.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn histogram(args: &HistogramArgs) -> Result<ExitCode> {
    let mut reports = Vec::new();
    for path in expand_inputs(&args.inputs, &["json"])? {
        let text = std::fs::read_to_string(&path)?;
        match serde_json::from_str::<MetricsReport>(&text) {
            Ok(r) => reports.push(r),
            Err(e) => debug!("skipping {}: {e}", path.display()),
        }
    }
    if reports.is_empty() {
        bail!(Error::Usage("no metrics reports found".into()));
    }
    let hist = f1_histogram(&reports, args.bins)?;
    write_atomic(&args.out, histogram_csv(&hist).as_bytes())?;
    if let Some(svg) = &args.svg {
        write_atomic(svg, histogram_svg(&hist).as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Exact,
    Fast,
}

#[derive(Args, Debug)]
pub struct WrapArgs {
    #[arg(long)]
    pub font: PathBuf,
    /// Pixel size.
    #[arg(long, default_value_t = 24.0)]
    pub size: f32,
    #[arg(long)]
    pub max_width: u32,
    #[arg(long)]
    pub max_height: u32,
    #[arg(long, value_enum, default_value_t = Algorithm::Fast)]
    pub algorithm: Algorithm,
    /// Text to wrap; read from stdin when absent.
    pub text: Option<String>,
}

pub fn wrap(args: &WrapArgs) -> Result<ExitCode> {
    let text = match &args.text {
        Some(t) => t.clone(),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s.trim_end_matches('\n').to_string()
        }
    };
    let font = FontAsset::load(&args.font, &CodepointPool { ranges: Vec::new() })
        .with_context(|| format!("loading {}", args.font.display()))?;
    let m = CountingMeasurer::new(font.measurer(args.size));
    let lines = match args.algorithm {
        Algorithm::Exact => text_wrap_exact(&m, &text, args.max_width, args.max_height),
        Algorithm::Fast => text_wrap_fast(&m, &text, args.max_width, args.max_height),
    };
    println!("{}", serde_json::to_string_pretty(&json!({ "lines": lines, "measure_calls": m.calls() }))?);
    Ok(ExitCode::SUCCESS)
}
