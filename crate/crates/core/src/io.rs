//! Image codecs for masks and the text formats written by the tools.

use std::fmt::Write as _;
use std::path::Path;

use image::{DynamicImage, GrayImage, Luma, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, ClassMask, ProbMap, TextClass};
use crate::metrics::{F1Histogram, FoldMap, SCHEMA_VERSION};
use crate::synth::textify::TextifyRecord;

pub const NON_TEXT_COLOR: [u8; 3] = [255, 255, 0];
pub const EASY_COLOR: [u8; 3] = [0, 0, 0];
pub const HARD_COLOR: [u8; 3] = [255, 0, 255];

pub fn class_color(class: TextClass) -> [u8; 3] {
    match class {
        TextClass::NonText => NON_TEXT_COLOR,
        TextClass::Easy => EASY_COLOR,
        TextClass::Hard => HARD_COLOR,
    }
}

/// Grayscale: 255 for text, 0 for background.
pub fn encode_binary(mask: &BinaryMask) -> GrayImage {
    let (w, h) = mask.dims();
    GrayImage::from_fn(w as u32, h as u32, |x, y| Luma([if mask.get(x as usize, y as usize) { 255 } else { 0 }]))
}

/// Luma ≥ 128 is text. Color images are converted to luma first.
pub fn decode_binary(img: &DynamicImage) -> Result<BinaryMask> {
    let gray = img.to_luma8();
    let (w, h) = gray.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage);
    }
    BinaryMask::from_vec(w as usize, h as usize, gray.pixels().map(|p| p.0[0] >= 128).collect())
}

pub fn encode_classes(mask: &ClassMask) -> RgbImage {
    let (w, h) = mask.dims();
    RgbImage::from_fn(w as u32, h as u32, |x, y| Rgb(class_color(mask.get(x as usize, y as usize))))
}

/// Maps palette colors to classes. With `fuzzy = None` colors must match
/// exactly. `Some(d)` accepts the nearest palette color within a maximum
/// channel difference of `d`; ties go to the first of non-text, easy, hard.
pub fn decode_classes(img: &RgbImage, fuzzy: Option<u8>) -> Result<ClassMask> {
    let (w, h) = img.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage);
    }
    let palette = [
        (TextClass::NonText, NON_TEXT_COLOR),
        (TextClass::Easy, EASY_COLOR),
        (TextClass::Hard, HARD_COLOR),
    ];
    let tol = fuzzy.unwrap_or(0);
    let mut data = Vec::with_capacity(w as usize * h as usize);
    for (x, y, p) in img.enumerate_pixels() {
        let mut best: Option<(u8, TextClass)> = None;
        for &(class, color) in &palette {
            let d = (0..3).map(|i| p.0[i].abs_diff(color[i])).max().unwrap();
            if d <= tol && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, class));
            }
        }
        match best {
            Some((_, class)) => data.push(class),
            None => {
                let [r, g, b] = p.0;
                return Err(Error::UnknownColor { r, g, b, x, y });
            }
        }
    }
    ClassMask::from_vec(w as usize, h as usize, data)
}

/// Ground truth from any image: grayscale images are binary masks whose
/// text counts as easy, color images use the three-class palette.
pub fn decode_ground_truth(img: &DynamicImage, fuzzy: Option<u8>) -> Result<ClassMask> {
    if img.color().has_color() {
        decode_classes(&img.to_rgb8(), fuzzy)
    } else {
        Ok(ClassMask::from_binary(&decode_binary(img)?, TextClass::Easy))
    }
}

/// A predicted mask: grayscale images are thresholded at 128, color images
/// must use the palette and count easy and hard pixels as text.
pub fn decode_prediction(img: &DynamicImage, fuzzy: Option<u8>) -> Result<BinaryMask> {
    if img.color().has_color() {
        Ok(decode_classes(&img.to_rgb8(), fuzzy)?.text_mask())
    } else {
        decode_binary(img)
    }
}

/// Probabilities from an 8-bit grayscale image, `v / 255`.
pub fn decode_prob(img: &DynamicImage) -> Result<ProbMap> {
    let gray = img.to_luma8();
    let (w, h) = gray.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage);
    }
    ProbMap::from_vec(w as usize, h as usize, gray.pixels().map(|p| p.0[0] as f64 / 255.0).collect())
}

pub fn open_image(path: &Path) -> Result<DynamicImage> {
    Ok(image::open(path)?)
}

pub fn read_folds(path: &Path) -> Result<FoldMap> {
    let text = std::fs::read_to_string(path)?;
    parse_folds(&text)
}

/// A JSON object from fold name to the stems it holds. A stem may belong to
/// one fold only.
pub fn parse_folds(text: &str) -> Result<FoldMap> {
    let folds: FoldMap = serde_json::from_str(text)?;
    let mut seen = std::collections::HashMap::new();
    for (fold, stems) in &folds {
        for stem in stems {
            if let Some(other) = seen.insert(stem.as_str(), fold.as_str()) {
                return Err(Error::Config(format!("stem {stem:?} is in folds {other:?} and {fold:?}")));
            }
        }
    }
    Ok(folds)
}

pub fn histogram_csv(hist: &F1Histogram) -> String {
    let mut out = String::from("class,mode,bin_lo,bin_hi,count\n");
    for row in hist.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.class.as_str(),
            row.mode.as_str(),
            row.bin_lo,
            row.bin_hi,
            row.count
        );
    }
    out
}

/// One bar chart per (class, mode) series, stacked vertically.
pub fn histogram_svg(hist: &F1Histogram) -> String {
    const PANEL_W: f64 = 400.0;
    const PANEL_H: f64 = 120.0;
    const GAP: f64 = 40.0;
    let series: Vec<_> = hist.counts.iter().collect();
    let height = series.len() as f64 * (PANEL_H + GAP) + GAP;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{height}" font-family="sans-serif" font-size="12">"#,
        PANEL_W + 2.0 * GAP
    );
    for (k, ((class, mode), counts)) in series.iter().enumerate() {
        let top = GAP + k as f64 * (PANEL_H + GAP);
        let peak = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
        let bar_w = PANEL_W / counts.len().max(1) as f64;
        let _ = writeln!(out, r#"<text x="{GAP}" y="{}">{} / {}</text>"#, top - 8.0, class.as_str(), mode.as_str());
        let _ = writeln!(
            out,
            r#"<line x1="{GAP}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
            top + PANEL_H,
            GAP + PANEL_W
        );
        for (i, &c) in counts.iter().enumerate() {
            let h = c as f64 / peak * PANEL_H;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4a7ab8"><title>{c}</title></rect>"##,
                GAP + i as f64 * bar_w,
                top + PANEL_H - h,
                bar_w - 1.0,
                h
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Sidecar of one synthetic pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub schema_version: u32,
    pub source: String,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub fonts: Vec<String>,
    #[serde(flatten)]
    pub record: TextifyRecord,
}

impl SynthManifest {
    pub fn new(source: String, seed: u64, width: u32, height: u32, fonts: Vec<String>, record: TextifyRecord) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            source,
            seed,
            width,
            height,
            fonts,
            record,
        }
    }
}
