//! Builds minimal TrueType files with straight-edged glyphs.
//!
//! Meant for fixtures and smoke runs where no real font is at hand. The
//! output has only the tables needed to map and draw glyphs (`cmap`, `glyf`,
//! `head`, `hhea`, `hmtx`, `loca`, `maxp`).

use std::collections::BTreeMap;

pub type Contour = Vec<(i16, i16)>;

const UNITS_PER_EM: u16 = 1000;
const ASCENT: i16 = 800;
const DESCENT: i16 = -200;

#[derive(Clone, Debug)]
struct Glyph {
    contours: Vec<Contour>,
    advance: u16,
}

#[derive(Clone, Debug)]
pub struct FontBuilder {
    glyphs: Vec<Glyph>,
    cmap: BTreeMap<u32, u16>,
}

impl Default for FontBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Axis-aligned box as a clockwise contour.
pub fn rect_contour(x0: i16, y0: i16, x1: i16, y1: i16) -> Contour {
    vec![(x0, y0), (x0, y1), (x1, y1), (x1, y0)]
}

/// Counter-clockwise box, cuts a hole when nested in a clockwise one.
pub fn hole_contour(x0: i16, y0: i16, x1: i16, y1: i16) -> Contour {
    vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
}

/// The hollow box used as glyph 0.
pub fn notdef_contours() -> Vec<Contour> {
    vec![rect_contour(100, 0, 700, 700), hole_contour(180, 80, 620, 620)]
}

/// A filled shape that differs between most codepoints: a base bar plus
/// up to four vertical bars chosen by the low bits of `c`.
pub fn bar_contours(c: char) -> Vec<Contour> {
    let mut out = vec![rect_contour(60, 0, 940, 120)];
    let bits = c as u32;
    for k in 0..4i16 {
        if (bits >> k) & 1 == 1 {
            let x = 80 + k * 220;
            out.push(rect_contour(x, 160, x + 140, 720));
        }
    }
    out
}

impl FontBuilder {
    /// A font holding only the `.notdef` glyph.
    pub fn new() -> Self {
        Self {
            glyphs: vec![Glyph {
                contours: notdef_contours(),
                advance: 800,
            }],
            cmap: BTreeMap::new(),
        }
    }

    /// Adds a glyph and returns its index.
    pub fn add_glyph(&mut self, contours: Vec<Contour>, advance: u16) -> u16 {
        self.glyphs.push(Glyph { contours, advance });
        (self.glyphs.len() - 1) as u16
    }

    pub fn map(&mut self, c: char, glyph: u16) -> &mut Self {
        self.cmap.insert(c as u32, glyph);
        self
    }

    /// Maps `c` to a fresh glyph drawn with [`bar_contours`].
    pub fn add_char(&mut self, c: char, advance: u16) -> &mut Self {
        let g = self.add_glyph(bar_contours(c), advance);
        self.map(c, g)
    }

    /// Maps `c` to a new glyph that copies the `.notdef` outline.
    pub fn add_tofu_alias(&mut self, c: char) -> &mut Self {
        let g = self.add_glyph(notdef_contours(), 800);
        self.map(c, g)
    }

    pub fn build(&self) -> Vec<u8> {
        let n = self.glyphs.len() as u16;
        let mut glyf = Vec::new();
        let mut loca = Vec::new();
        let (mut max_points, mut max_contours) = (0u16, 0u16);
        let (mut x_min, mut y_min, mut x_max, mut y_max) = (i16::MAX, i16::MAX, i16::MIN, i16::MIN);
        let mut hmtx = Vec::new();
        for g in &self.glyphs {
            loca.extend((glyf.len() as u32).to_be_bytes());
            let lsb = if g.contours.is_empty() {
                0
            } else {
                let pts = g.contours.iter().flatten();
                let gx0 = pts.clone().map(|p| p.0).min().unwrap();
                let gy0 = pts.clone().map(|p| p.1).min().unwrap();
                let gx1 = pts.clone().map(|p| p.0).max().unwrap();
                let gy1 = pts.clone().map(|p| p.1).max().unwrap();
                x_min = x_min.min(gx0);
                y_min = y_min.min(gy0);
                x_max = x_max.max(gx1);
                y_max = y_max.max(gy1);
                max_points = max_points.max(g.contours.iter().map(Vec::len).sum::<usize>() as u16);
                max_contours = max_contours.max(g.contours.len() as u16);
                write_glyph(&mut glyf, &g.contours, [gx0, gy0, gx1, gy1]);
                gx0
            };
            hmtx.extend(g.advance.to_be_bytes());
            hmtx.extend(lsb.to_be_bytes());
        }
        loca.extend((glyf.len() as u32).to_be_bytes());
        if x_min > x_max {
            (x_min, y_min, x_max, y_max) = (0, 0, 0, 0);
        }
        let advance_max = self.glyphs.iter().map(|g| g.advance).max().unwrap_or(0);

        let mut head = Vec::new();
        head.extend(0x0001_0000u32.to_be_bytes());
        head.extend(0x0001_0000u32.to_be_bytes());
        head.extend(0u32.to_be_bytes()); // checksum adjustment
        head.extend(0x5F0F_3CF5u32.to_be_bytes());
        head.extend(0x000Bu16.to_be_bytes());
        head.extend(UNITS_PER_EM.to_be_bytes());
        head.extend([0u8; 16]); // created, modified
        for v in [x_min, y_min, x_max, y_max] {
            head.extend(v.to_be_bytes());
        }
        head.extend(0u16.to_be_bytes()); // macStyle
        head.extend(8u16.to_be_bytes()); // lowestRecPPEM
        head.extend(2i16.to_be_bytes());
        head.extend(1i16.to_be_bytes()); // long loca
        head.extend(0i16.to_be_bytes());

        let mut hhea = Vec::new();
        hhea.extend(0x0001_0000u32.to_be_bytes());
        hhea.extend(ASCENT.to_be_bytes());
        hhea.extend(DESCENT.to_be_bytes());
        hhea.extend(0i16.to_be_bytes());
        hhea.extend(advance_max.to_be_bytes());
        hhea.extend(x_min.to_be_bytes());
        hhea.extend(0i16.to_be_bytes());
        hhea.extend(x_max.to_be_bytes());
        hhea.extend(1i16.to_be_bytes());
        hhea.extend(0i16.to_be_bytes());
        hhea.extend([0u8; 10]); // caret offset, reserved
        hhea.extend(0i16.to_be_bytes());
        hhea.extend(n.to_be_bytes());

        let mut maxp = Vec::new();
        maxp.extend(0x0001_0000u32.to_be_bytes());
        maxp.extend(n.to_be_bytes());
        maxp.extend(max_points.to_be_bytes());
        maxp.extend(max_contours.to_be_bytes());
        maxp.extend([0u8; 4]);
        maxp.extend(2u16.to_be_bytes());
        maxp.extend([0u8; 18]);

        let mut cmap = Vec::new();
        cmap.extend(0u16.to_be_bytes());
        cmap.extend(1u16.to_be_bytes());
        cmap.extend(3u16.to_be_bytes());
        cmap.extend(10u16.to_be_bytes());
        cmap.extend(12u32.to_be_bytes());
        let groups = self.cmap.len() as u32;
        cmap.extend(12u16.to_be_bytes());
        cmap.extend(0u16.to_be_bytes());
        cmap.extend((16 + 12 * groups).to_be_bytes());
        cmap.extend(0u32.to_be_bytes());
        cmap.extend(groups.to_be_bytes());
        for (&cp, &g) in &self.cmap {
            cmap.extend(cp.to_be_bytes());
            cmap.extend(cp.to_be_bytes());
            cmap.extend((g as u32).to_be_bytes());
        }

        let tables: [(&[u8; 4], Vec<u8>); 7] = [
            (b"cmap", cmap),
            (b"glyf", glyf),
            (b"head", head),
            (b"hhea", hhea),
            (b"hmtx", hmtx),
            (b"loca", loca),
            (b"maxp", maxp),
        ];
        let num = tables.len() as u16;
        let entry_selector = 15 - num.leading_zeros() as u16;
        let search_range = 16 * (1u16 << entry_selector);
        let mut out = Vec::new();
        out.extend(0x0001_0000u32.to_be_bytes());
        out.extend(num.to_be_bytes());
        out.extend(search_range.to_be_bytes());
        out.extend(entry_selector.to_be_bytes());
        out.extend((num * 16 - search_range).to_be_bytes());
        let mut offset = 12 + 16 * tables.len();
        let mut body = Vec::new();
        for (tag, data) in &tables {
            out.extend(*tag);
            out.extend(checksum(data).to_be_bytes());
            out.extend((offset as u32).to_be_bytes());
            out.extend((data.len() as u32).to_be_bytes());
            body.extend(data);
            while body.len() % 4 != 0 {
                body.push(0);
            }
            offset = 12 + 16 * tables.len() + body.len();
        }
        out.extend(body);
        out
    }
}

fn checksum(data: &[u8]) -> u32 {
    data.chunks(4).fold(0u32, |acc, c| {
        let mut word = [0u8; 4];
        word[..c.len()].copy_from_slice(c);
        acc.wrapping_add(u32::from_be_bytes(word))
    })
}

fn write_glyph(out: &mut Vec<u8>, contours: &[Contour], bounds: [i16; 4]) {
    out.extend((contours.len() as i16).to_be_bytes());
    for v in bounds {
        out.extend(v.to_be_bytes());
    }
    let mut end = 0u16;
    for c in contours {
        end += c.len() as u16;
        out.extend((end - 1).to_be_bytes());
    }
    out.extend(0u16.to_be_bytes()); // no instructions
    let points: Vec<(i16, i16)> = contours.iter().flatten().copied().collect();
    out.extend(std::iter::repeat(1u8).take(points.len())); // on-curve, 16-bit deltas
    let mut prev = 0i16;
    for p in &points {
        out.extend((p.0 - prev).to_be_bytes());
        prev = p.0;
    }
    prev = 0;
    for p in &points {
        out.extend((p.1 - prev).to_be_bytes());
        prev = p.1;
    }
    while out.len() % 4 != 0 {
        out.push(0);
    }
}

/// A font covering `chars`, each drawn with [`bar_contours`], all with the
/// same advance.
pub fn bar_font(chars: impl IntoIterator<Item = char>, advance: u16) -> Vec<u8> {
    let mut b = FontBuilder::new();
    for c in chars {
        b.add_char(c, advance);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_maps() {
        let mut b = FontBuilder::new();
        b.add_char('a', 500).add_char('本', 1000).add_tofu_alias('z');
        let data = b.build();
        let face = ttf_parser::Face::parse(&data, 0).unwrap();
        assert_eq!(face.number_of_glyphs(), 4);
        assert_eq!(face.units_per_em(), 1000);
        assert_eq!(face.glyph_index('a').map(|g| g.0), Some(1));
        assert_eq!(face.glyph_index('本').map(|g| g.0), Some(2));
        assert_eq!(face.glyph_index('q'), None);
        assert_eq!(face.glyph_hor_advance(face.glyph_index('a').unwrap()), Some(500));
    }
}
