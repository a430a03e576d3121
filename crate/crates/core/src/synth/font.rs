use std::fmt;
use std::ops::RangeInclusive;
use std::path::Path;
use std::sync::Arc;

use ab_glyph::{point, Font, FontArc, PxScale, ScaleFont};
use ttf_parser::{Face, GlyphId, OutlineBuilder};

use super::wrap::TextMeasurer;
use crate::error::{Error, Result};

/// Codepoint often mapped to the placeholder glyph by fonts that fake
/// coverage.
pub const PLACEHOLDER_PROBE: char = '\u{1d}';

/// Codepoints text is sampled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodepointPool {
    pub ranges: Vec<RangeInclusive<u32>>,
}

impl Default for CodepointPool {
    /// Printable ASCII, CJK punctuation, hiragana, katakana, fullwidth forms
    /// and the CJK unified ideographs up to U+9FA5.
    fn default() -> Self {
        Self {
            ranges: vec![
                0x21..=0x7E,
                0x3000..=0x303F,
                0x3041..=0x3096,
                0x30A1..=0x30FA,
                0xFF01..=0xFF5E,
                0x4E00..=0x9FA5,
            ],
        }
    }
}

impl CodepointPool {
    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.ranges.iter().flat_map(|r| r.clone()).filter_map(char::from_u32)
    }

    pub fn len(&self) -> usize {
        self.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Seg {
    Move(f32, f32),
    Line(f32, f32),
    Quad(f32, f32, f32, f32),
    Cubic(f32, f32, f32, f32, f32, f32),
    Close,
}

#[derive(Default)]
struct Recorder(Vec<Seg>);

impl OutlineBuilder for Recorder {
    fn move_to(&mut self, x: f32, y: f32) {
        self.0.push(Seg::Move(x, y));
    }
    fn line_to(&mut self, x: f32, y: f32) {
        self.0.push(Seg::Line(x, y));
    }
    fn quad_to(&mut self, x1: f32, y1: f32, x: f32, y: f32) {
        self.0.push(Seg::Quad(x1, y1, x, y));
    }
    fn curve_to(&mut self, x1: f32, y1: f32, x2: f32, y2: f32, x: f32, y: f32) {
        self.0.push(Seg::Cubic(x1, y1, x2, y2, x, y));
    }
    fn close(&mut self) {
        self.0.push(Seg::Close);
    }
}

fn outline(face: &Face, gid: GlyphId) -> Option<Vec<Seg>> {
    let mut rec = Recorder::default();
    face.outline_glyph(gid, &mut rec)?;
    (!rec.0.is_empty()).then_some(rec.0)
}

/// Answers glyph-support queries for one parsed font.
pub struct GlyphChecker<'a> {
    face: Face<'a>,
    placeholders: Vec<Vec<Seg>>,
}

impl<'a> GlyphChecker<'a> {
    pub fn new(data: &'a [u8]) -> Result<Self> {
        let face = Face::parse(data, 0).map_err(|e| Error::Font(e.to_string()))?;
        let mut placeholders = Vec::new();
        if let Some(o) = outline(&face, GlyphId(0)) {
            placeholders.push(o);
        }
        if let Some(g) = face.glyph_index(PLACEHOLDER_PROBE) {
            if let Some(o) = outline(&face, g) {
                if !placeholders.contains(&o) {
                    placeholders.push(o);
                }
            }
        }
        Ok(Self { face, placeholders })
    }

    /// True when `c` maps to a real glyph: not glyph 0, with a nonempty
    /// outline that differs from the placeholder outlines.
    pub fn supports(&self, c: char) -> bool {
        let Some(gid) = self.face.glyph_index(c) else {
            return false;
        };
        if gid.0 == 0 {
            return false;
        }
        match outline(&self.face, gid) {
            Some(o) => !self.placeholders.contains(&o),
            None => false,
        }
    }
}

/// One-off form of [`GlyphChecker::supports`].
pub fn supports_char(font_data: &[u8], c: char) -> Result<bool> {
    Ok(GlyphChecker::new(font_data)?.supports(c))
}

/// A loaded font plus the pool codepoints it can really draw.
#[derive(Clone)]
pub struct FontAsset {
    id: String,
    font: FontArc,
    supported: Arc<Vec<char>>,
}

impl fmt::Debug for FontAsset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FontAsset")
            .field("id", &self.id)
            .field("supported", &self.supported.len())
            .finish()
    }
}

impl FontAsset {
    pub fn from_bytes(id: impl Into<String>, data: Vec<u8>, pool: &CodepointPool) -> Result<Self> {
        let supported: Vec<char> = {
            let checker = GlyphChecker::new(&data)?;
            let mut v: Vec<char> = pool.chars().filter(|&c| checker.supports(c)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let font = FontArc::try_from_vec(data).map_err(|e| Error::Font(e.to_string()))?;
        Ok(Self {
            id: id.into(),
            font,
            supported: Arc::new(supported),
        })
    }

    /// Loads a font file; its file name becomes the id.
    pub fn load(path: &Path, pool: &CodepointPool) -> Result<Self> {
        let data = std::fs::read(path)?;
        let id = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_bytes(id, data, pool)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Supported codepoints, sorted.
    pub fn supported(&self) -> &[char] {
        &self.supported
    }

    pub fn supports(&self, c: char) -> bool {
        self.supported.binary_search(&c).is_ok()
    }

    pub fn measurer(&self, px: f32) -> FontMeasurer {
        FontMeasurer {
            font: self.font.clone(),
            scale: PxScale::from(px),
        }
    }
}

/// Horizontal measurer backed by a font at a pixel size. Widths are rounded
/// up; the height of any string is the line height.
#[derive(Clone)]
pub struct FontMeasurer {
    font: FontArc,
    scale: PxScale,
}

impl FontMeasurer {
    pub fn line_height(&self) -> u32 {
        self.font.as_scaled(self.scale).height().ceil().max(0.0) as u32
    }

    pub fn ascent(&self) -> f32 {
        self.font.as_scaled(self.scale).ascent()
    }

    pub fn advance(&self, c: char) -> f32 {
        let s = self.font.as_scaled(self.scale);
        s.h_advance(self.font.glyph_id(c))
    }

    /// Adds the coverage of `c`, drawn with its origin at `(x, baseline)`,
    /// into a `width`×`height` layer. Coverage is combined by maximum.
    pub fn draw_char(&self, c: char, x: f32, baseline: f32, layer: &mut [f32], width: usize, height: usize) {
        let glyph = self.font.glyph_id(c).with_scale_and_position(self.scale, point(x, baseline));
        if let Some(outlined) = self.font.outline_glyph(glyph) {
            let b = outlined.px_bounds();
            outlined.draw(|gx, gy, cov| {
                let px = b.min.x as i64 + gx as i64;
                let py = b.min.y as i64 + gy as i64;
                if px >= 0 && py >= 0 && (px as usize) < width && (py as usize) < height {
                    let cell = &mut layer[py as usize * width + px as usize];
                    *cell = cell.max(cov);
                }
            });
        }
    }
}

impl TextMeasurer for FontMeasurer {
    fn measure(&self, text: &str) -> (u32, u32) {
        let s = self.font.as_scaled(self.scale);
        let w: f32 = text.chars().map(|c| s.h_advance(self.font.glyph_id(c))).sum();
        (w.ceil().max(0.0) as u32, self.line_height())
    }
}
