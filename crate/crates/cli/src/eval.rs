use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use log::{info, warn};
use mangaseg::io::{decode_ground_truth, decode_prediction, open_image, read_folds};
use mangaseg::metrics::{aggregate, evaluate, MetricsReport, Mode, RelaxConfig};
use mangaseg::Error;
use rayon::prelude::*;

use crate::util::{ensure_dir, images_by_stem, thread_pool, write_atomic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Normal,
    Relaxed,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> &'static [Mode] {
        match self {
            ModeArg::Normal => &[Mode::Normal],
            ModeArg::Relaxed => &[Mode::Relaxed],
            ModeArg::Both => &[Mode::Normal, Mode::Relaxed],
        }
    }
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Directory of ground-truth masks (palette or grayscale PNG).
    #[arg(long)]
    pub gt: PathBuf,
    /// Directory of predicted masks, paired with the ground truth by file stem.
    #[arg(long)]
    pub pred: PathBuf,
    /// Output directory for per-image reports and summary.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Erosion/dilation depth of relaxed mode.
    #[arg(long, default_value_t = 1)]
    pub relax_iters: usize,
    /// Fail when a file has no partner instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// JSON object mapping fold names to lists of stems.
    #[arg(long)]
    pub folds: Option<PathBuf>,
    /// Snap colors within this channel distance to the palette.
    #[arg(long, value_name = "D")]
    pub fuzzy_palette: Option<u8>,
}

fn eval_pair(gt: &Path, pred: &Path, stem: &str, args: &EvalArgs, relax: RelaxConfig) -> Result<Vec<MetricsReport>> {
    let gt = decode_ground_truth(&open_image(gt)?, args.fuzzy_palette).context("ground truth")?;
    let pred = decode_prediction(&open_image(pred)?, args.fuzzy_palette).context("prediction")?;
    let mut out = Vec::new();
    for &mode in args.mode.modes() {
        let report = evaluate(&gt, &pred, mode, relax, stem)?;
        let path = args.out.join(format!("{stem}.{}.json", mode.as_str()));
        write_atomic(&path, report.to_json()?.as_bytes())?;
        out.push(report);
    }
    Ok(out)
}

pub fn run(args: &EvalArgs, jobs: Option<usize>) -> Result<ExitCode> {
    let relax = RelaxConfig::new(args.relax_iters)?;
    let folds = args.folds.as_deref().map(read_folds).transpose().context("reading fold manifest")?;
    let gts = images_by_stem(&args.gt)?;
    let preds = images_by_stem(&args.pred)?;
    let mut unpaired: Vec<String> = gts
        .keys()
        .filter(|s| !preds.contains_key(*s))
        .map(|s| format!("{} (no prediction)", gts[s].display()))
        .collect();
    unpaired.extend(
        preds
            .keys()
            .filter(|s| !gts.contains_key(*s))
            .map(|s| format!("{} (no ground truth)", preds[s].display())),
    );
    if !unpaired.is_empty() {
        if args.strict {
            bail!(Error::Usage(format!("unpaired files:\n  {}", unpaired.join("\n  "))));
        }
        for u in &unpaired {
            warn!("skipping {u}");
        }
    }
    let pairs: Vec<(&String, &PathBuf, &PathBuf)> = gts
        .iter()
        .filter_map(|(s, g)| preds.get(s).map(|p| (s, g, p)))
        .collect();
    if pairs.is_empty() {
        bail!(Error::Usage("no ground-truth/prediction pairs found".into()));
    }
    ensure_dir(&args.out)?;
    info!("evaluating {} pairs", pairs.len());

    let results: Vec<(String, Result<Vec<MetricsReport>>)> = thread_pool(jobs)?.install(|| {
        pairs
            .par_iter()
            .map(|(s, g, p)| (s.to_string(), eval_pair(g, p, s, args, relax)))
            .collect()
    });
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (stem, r) in results {
        match r {
            Ok(rs) => reports.extend(rs),
            Err(e) => failures.push(format!("{stem}: {e:#}")),
        }
    }
    if !reports.is_empty() {
        let summary = aggregate(&reports, folds.as_ref())?;
        if !summary.unassigned.is_empty() {
            warn!("not in any fold: {}", summary.unassigned.join(", "));
        }
        write_atomic(&args.out.join("summary.json"), serde_json::to_string_pretty(&summary)?.as_bytes())?;
        for (key, value) in &summary.overall {
            println!("{key}\t{value}");
        }
    }
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} of {} pairs failed:", failures.len(), pairs.len());
        for f in &failures {
            eprintln!("  {f}");
        }
        Ok(ExitCode::FAILURE)
    }
}
