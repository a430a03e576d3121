//! Overlaying random text on artwork.

use image::{Rgb, RgbImage};
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::font::FontAsset;
use super::rects::{generate_rects, Rect};
use super::wrap::{text_wrap_fast, TextMeasurer};
use crate::error::{Error, Result};
use crate::mask::{dilate, BinaryMask};

/// Canvases narrower or shorter than this get no text.
pub const MIN_CANVAS: u32 = 16;
/// Rect interiors smaller than this (after padding) get no text.
pub const MIN_TEXT_BOX: u32 = 6;

/// Probabilities and ranges of the styling schedule. Ranges are inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextifyConfig {
    pub padding: (u32, u32),
    pub p_single_rect: f64,
    pub single_rect_min_area: f64,
    pub rect_count: (usize, usize),
    pub p_regular_size: f64,
    pub regular_size: (u32, u32),
    pub large_size: (u32, u32),
    pub fill_factor: f64,
    pub p_black_text: f64,
    pub p_white_border: f64,
    pub p_border: f64,
    pub border_width: (usize, usize),
    pub p_vertical: f64,
    pub p_rotate: f64,
    pub rotation_deg: (f64, f64),
    pub p_transparent: f64,
    pub transparency: (f64, f64),
    pub p_center: f64,
    pub p_grayscale: f64,
}

impl Default for TextifyConfig {
    fn default() -> Self {
        Self {
            padding: (4, 10),
            p_single_rect: 0.5,
            single_rect_min_area: 0.66,
            rect_count: (7, 15),
            p_regular_size: 0.8,
            regular_size: (14, 28),
            large_size: (28, 72),
            fill_factor: 0.5,
            p_black_text: 0.8,
            p_white_border: 0.8,
            p_border: 0.3,
            border_width: (1, 3),
            p_vertical: 0.1,
            p_rotate: 0.1,
            rotation_deg: (5.0, 30.0),
            p_transparent: 0.05,
            transparency: (0.2, 0.6),
            p_center: 0.5,
            p_grayscale: 0.2,
        }
    }
}

impl TextifyConfig {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            self.p_single_rect,
            self.p_regular_size,
            self.p_black_text,
            self.p_white_border,
            self.p_border,
            self.p_vertical,
            self.p_rotate,
            self.p_transparent,
            self.p_center,
            self.p_grayscale,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        let ordered = self.padding.0 <= self.padding.1
            && self.rect_count.0 <= self.rect_count.1
            && self.regular_size.0 <= self.regular_size.1
            && self.large_size.0 <= self.large_size.1
            && self.border_width.0 <= self.border_width.1
            && self.rotation_deg.0 <= self.rotation_deg.1
            && self.transparency.0 <= self.transparency.1;
        if !ordered {
            return Err(Error::Config("range bounds out of order".into()));
        }
        if self.regular_size.0 == 0 || self.large_size.0 == 0 {
            return Err(Error::Config("text size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.single_rect_min_area) || !(self.fill_factor > 0.0) {
            return Err(Error::Config("single_rect_min_area in [0, 1], fill_factor > 0".into()));
        }
        if self.transparency.0 < 0.0 || self.transparency.1 > 1.0 {
            return Err(Error::Config("transparency must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Everything decided for one rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleDecision {
    pub rect: Rect,
    pub font: String,
    pub size: u32,
    pub text: String,
    pub lines: Vec<String>,
    pub text_color: [u8; 3],
    pub border_color: [u8; 3],
    /// 0 means no border.
    pub border_width: usize,
    pub orientation: Orientation,
    /// Weight of the original pixel when blending; 0 is opaque text.
    pub transparency: f64,
    pub rotation: f64,
    pub centered: bool,
}

/// What was placed, in placement order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextifyRecord {
    pub padding: u32,
    pub single_rect: bool,
    pub rects: Vec<Rect>,
    pub styles: Vec<StyleDecision>,
    /// Text and border colors were turned to gray.
    pub grayscale: bool,
}

#[derive(Clone, Debug)]
pub struct TextifyOutput {
    pub image: RgbImage,
    pub mask: BinaryMask,
    pub record: TextifyRecord,
}

/// Vertical text: every character takes a square cell.
struct Columns {
    cell: u32,
}

impl TextMeasurer for Columns {
    fn measure(&self, text: &str) -> (u32, u32) {
        (text.chars().count() as u32 * self.cell, self.cell)
    }
}

fn random_color<R: Rng + ?Sized>(rng: &mut R, p_default: f64, default: [u8; 3]) -> [u8; 3] {
    if rng.gen::<f64>() < p_default {
        default
    } else {
        rng.gen()
    }
}

fn gray([r, g, b]: [u8; 3]) -> [u8; 3] {
    let l = (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8;
    [l, l, l]
}

/// Draws random text onto a copy of `image`.
///
/// The returned mask holds exactly the pixels whose color changed. Glyphs
/// are drawn where the rasterized coverage exceeds one half, so there is no
/// anti-aliasing fringe outside the mask. All drawing stays inside the
/// padded rectangles.
pub fn textify<R: Rng + ?Sized>(
    image: &RgbImage,
    fonts: &[FontAsset],
    config: &TextifyConfig,
    rng: &mut R,
) -> Result<TextifyOutput> {
    config.validate()?;
    let usable: Vec<&FontAsset> = fonts.iter().filter(|f| !f.supported().is_empty()).collect();
    if usable.is_empty() {
        return Err(Error::Config("no font supports any codepoint of the pool".into()));
    }
    let (width, height) = image.dimensions();
    let mut record = TextifyRecord {
        padding: 0,
        single_rect: false,
        rects: Vec::new(),
        styles: Vec::new(),
        grayscale: false,
    };
    if width < MIN_CANVAS || height < MIN_CANVAS {
        let mask = BinaryMask::new(width.max(1) as usize, height.max(1) as usize);
        return Ok(TextifyOutput {
            image: image.clone(),
            mask,
            record,
        });
    }

    record.padding = rng.gen_range(config.padding.0..=config.padding.1);
    if rng.gen::<f64>() < config.p_single_rect {
        record.single_rect = true;
        let lo = config.single_rect_min_area.sqrt();
        let w = ((rng.gen_range(lo..=1.0) * width as f64).ceil() as u32).clamp(1, width);
        let h = ((rng.gen_range(lo..=1.0) * height as f64).ceil() as u32).clamp(1, height);
        let x = rng.gen_range(0..=width - w);
        let y = rng.gen_range(0..=height - h);
        record.rects.push(Rect::new(x, y, w, h));
    } else {
        let limit = rng.gen_range(config.rect_count.0..=config.rect_count.1);
        record.rects = generate_rects(width, height, limit, rng);
    }

    let weights = WeightedIndex::new(usable.iter().map(|f| f.supported().len()))
        .map_err(|e| Error::Config(e.to_string()))?;
    for &rect in &record.rects {
        let Some(inner) = rect.inset(record.padding) else { continue };
        if inner.w < MIN_TEXT_BOX || inner.h < MIN_TEXT_BOX {
            continue;
        }
        let size = if rng.gen::<f64>() < config.p_regular_size {
            rng.gen_range(config.regular_size.0..=config.regular_size.1)
        } else {
            rng.gen_range(config.large_size.0..=config.large_size.1)
        }
        .min(inner.w.min(inner.h));
        let capacity = (inner.w / size) as f64 * (inner.h / size) as f64;
        let n_chars = ((capacity * config.fill_factor).round() as usize).max(1);
        let font = usable[weights.sample(rng)];
        let pool = font.supported();
        let text: String = (0..n_chars).map(|_| pool[rng.gen_range(0..pool.len())]).collect();

        let text_color = random_color(rng, config.p_black_text, [0, 0, 0]);
        let border_color = random_color(rng, config.p_white_border, [255, 255, 255]);
        let border_width = if rng.gen::<f64>() < config.p_border {
            rng.gen_range(config.border_width.0..=config.border_width.1)
        } else {
            0
        };
        let orientation = if rng.gen::<f64>() < config.p_vertical {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        };
        let rotation = if rng.gen::<f64>() < config.p_rotate {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            sign * rng.gen_range(config.rotation_deg.0..=config.rotation_deg.1)
        } else {
            0.0
        };
        let transparency = if rng.gen::<f64>() < config.p_transparent {
            rng.gen_range(config.transparency.0..=config.transparency.1)
        } else {
            0.0
        };
        let centered = rng.gen::<f64>() < config.p_center;

        let lines = match orientation {
            Orientation::Horizontal => text_wrap_fast(&font.measurer(size as f32), &text, inner.w, inner.h),
            Orientation::Vertical => text_wrap_fast(&Columns { cell: size }, &text, inner.h, inner.w),
        };
        record.styles.push(StyleDecision {
            rect,
            font: font.id().to_string(),
            size,
            text,
            lines,
            text_color,
            border_color,
            border_width,
            orientation,
            transparency,
            rotation,
            centered,
        });
    }
    record.grayscale = rng.gen::<f64>() < config.p_grayscale;

    let mut out = image.clone();
    for style in &record.styles {
        let font = usable
            .iter()
            .find(|f| f.id() == style.font)
            .expect("style refers to a listed font");
        let inner = style.rect.inset(record.padding).expect("checked above");
        draw_style(&mut out, font, inner, style, record.grayscale);
    }
    let mask = BinaryMask::from_fn(width as usize, height as usize, |x, y| {
        out.get_pixel(x as u32, y as u32) != image.get_pixel(x as u32, y as u32)
    });
    Ok(TextifyOutput { image: out, mask, record })
}

fn layout_glyphs(font: &FontAsset, inner: Rect, style: &StyleDecision) -> BinaryMask {
    let (w, h) = (inner.w as usize, inner.h as usize);
    let m = font.measurer(style.size as f32);
    let mut layer = vec![0.0f32; w * h];
    match style.orientation {
        Orientation::Horizontal => {
            let line_h = m.line_height() as f32;
            let total = line_h * style.lines.len() as f32;
            let top = if style.centered { ((h as f32 - total) / 2.0).floor() } else { 0.0 };
            for (k, line) in style.lines.iter().enumerate() {
                let left = if style.centered {
                    ((w as f32 - m.measure(line).0 as f32) / 2.0).floor()
                } else {
                    0.0
                };
                let baseline = top + k as f32 * line_h + m.ascent();
                let mut x = left;
                for c in line.chars() {
                    m.draw_char(c, x, baseline, &mut layer, w, h);
                    x += m.advance(c);
                }
            }
        }
        Orientation::Vertical => {
            let cell = style.size as f32;
            let total = cell * style.lines.len() as f32;
            let right = if style.centered { w as f32 - ((w as f32 - total) / 2.0).floor() } else { w as f32 };
            for (k, column) in style.lines.iter().enumerate() {
                let col_x = right - (k + 1) as f32 * cell;
                let len = cell * column.chars().count() as f32;
                let top = if style.centered { ((h as f32 - len) / 2.0).floor() } else { 0.0 };
                for (i, c) in column.chars().enumerate() {
                    let x = col_x + ((cell - m.advance(c)) / 2.0).floor();
                    m.draw_char(c, x, top + i as f32 * cell + m.ascent(), &mut layer, w, h);
                }
            }
        }
    }
    BinaryMask::from_vec(w, h, layer.into_iter().map(|c| c > 0.5).collect()).expect("layer size")
}

fn rotate(mask: &BinaryMask, degrees: f64) -> BinaryMask {
    let (w, h) = mask.dims();
    let (s, c) = degrees.to_radians().sin_cos();
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let sx = (c * dx + s * dy + cx).round();
        let sy = (-s * dx + c * dy + cy).round();
        mask.get_signed(sx as isize, sy as isize)
    })
}

fn draw_style(out: &mut RgbImage, font: &FontAsset, inner: Rect, style: &StyleDecision, grayscale: bool) {
    let mut text = layout_glyphs(font, inner, style);
    let mut border = if style.border_width > 0 {
        let grown = dilate(&text, style.border_width);
        BinaryMask::from_fn(text.width(), text.height(), |x, y| grown.get(x, y) && !text.get(x, y))
    } else {
        BinaryMask::new(text.width(), text.height())
    };
    if style.rotation != 0.0 {
        text = rotate(&text, style.rotation);
        border = rotate(&border, style.rotation);
    }
    let (text_color, border_color) = if grayscale {
        (gray(style.text_color), gray(style.border_color))
    } else {
        (style.text_color, style.border_color)
    };
    let t = style.transparency;
    for y in 0..text.height() {
        for x in 0..text.width() {
            let color = if text.get(x, y) {
                text_color
            } else if border.get(x, y) {
                border_color
            } else {
                continue;
            };
            let px = out.get_pixel_mut(inner.x + x as u32, inner.y + y as u32);
            let blended: [u8; 3] =
                std::array::from_fn(|i| (t * px.0[i] as f64 + (1.0 - t) * color[i] as f64).round() as u8);
            *px = Rgb(blended);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::font::CodepointPool;
    use super::super::fontgen::bar_font;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fonts() -> Vec<FontAsset> {
        let pool = CodepointPool::default();
        vec![
            FontAsset::from_bytes("narrow", bar_font("abcdefgh".chars(), 600), &pool).unwrap(),
            FontAsset::from_bytes("kana", bar_font("あいうえおかきくけこ漢字".chars(), 1000), &pool).unwrap(),
        ]
    }

    fn canvas(w: u32, h: u32) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| Rgb([(x * 7 % 251) as u8, (y * 13 % 241) as u8, 200]))
    }

    #[test]
    fn tiny_canvas_is_untouched() {
        let img = canvas(12, 40);
        let out = textify(&img, &fonts(), &TextifyConfig::default(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(out.image, img);
        assert!(out.mask.is_empty());
        assert!(out.record.rects.is_empty());
    }

    #[test]
    fn no_usable_font_is_a_config_error() {
        let pool = CodepointPool { ranges: vec![0xE000..=0xE010] };
        let f = FontAsset::from_bytes("x", bar_font("ab".chars(), 500), &pool).unwrap();
        let err = textify(&canvas(64, 64), &[f], &TextifyConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(Error::Config(_))));
        let err = textify(&canvas(64, 64), &[], &TextifyConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn mask_is_the_diff_and_stays_in_padded_rects() {
        let img = canvas(160, 120);
        let fonts = fonts();
        let mut drew = 0;
        for seed in 0..100u64 {
            let out = textify(&img, &fonts, &TextifyConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let pad = out.record.padding;
            let inner: Vec<Rect> = out.record.rects.iter().filter_map(|r| r.inset(pad)).collect();
            for y in 0..120u32 {
                for x in 0..160u32 {
                    let changed = out.image.get_pixel(x, y) != img.get_pixel(x, y);
                    assert_eq!(changed, out.mask.get(x as usize, y as usize));
                    if changed {
                        assert!(inner.iter().any(|r| r.contains(x, y)), "seed {seed} ({x},{y})");
                    }
                }
            }
            drew += usize::from(!out.mask.is_empty());
        }
        assert!(drew > 50, "{drew}");
    }

    #[test]
    fn single_rect_covers_enough() {
        let cfg = TextifyConfig {
            p_single_rect: 1.0,
            ..Default::default()
        };
        for seed in 0..50 {
            let out = textify(&canvas(100, 80), &fonts(), &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(out.record.rects.len(), 1);
            assert!(out.record.rects[0].area() as f64 >= 0.66 * 8000.0);
        }
    }

    #[test]
    fn every_style_option_keeps_the_mask_exact() {
        let cfg = TextifyConfig {
            p_border: 1.0,
            p_vertical: 0.5,
            p_rotate: 1.0,
            p_transparent: 1.0,
            p_grayscale: 1.0,
            ..Default::default()
        };
        let img = canvas(128, 128);
        for seed in 0..20 {
            let out = textify(&img, &fonts(), &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let diff = BinaryMask::from_fn(128, 128, |x, y| out.image.get_pixel(x as u32, y as u32) != img.get_pixel(x as u32, y as u32));
            assert_eq!(diff, out.mask);
            assert!(out.record.styles.iter().all(|s| s.rotation.abs() >= 5.0 && s.border_width >= 1));
        }
    }

    #[test]
    fn deterministic() {
        let img = canvas(200, 150);
        let a = textify(&img, &fonts(), &TextifyConfig::default(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = textify(&img, &fonts(), &TextifyConfig::default(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.mask, b.mask);
        assert_eq!(a.record, b.record);
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = TextifyConfig {
            p_border: 1.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(TextifyConfig::default().validate().is_ok());
    }
}
