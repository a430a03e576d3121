//! Raster types, connected-component labelling and binary morphology.
//!
//! Morphology always uses the cross-shaped (4-connected) structuring element.
//! Pixels outside the image are treated as background by both erosion and
//! dilation. Connected components are 8-connected.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};

const NEIGHBORS_4: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

pub(crate) const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// A 2-D grid of text (`true`) / background (`false`) pixels, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    /// An all-background mask.
    ///
    /// # Panics
    /// Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be nonzero");
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height {
            return Err(Error::BadLength {
                len: data.len(),
                width,
                height,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                mask.data[y * width + x] = f(x, y);
            }
        }
        mask
    }

    /// Parses a picture where `#` (or `1`) marks text and anything else is
    /// background. Rows may be separated by newlines; surrounding whitespace is
    /// trimmed and blank lines are skipped.
    ///
    /// ```
    /// use mangaseg::BinaryMask;
    /// let m = BinaryMask::from_ascii("
    ///     #..
    ///     .#.
    /// ").unwrap();
    /// assert_eq!((m.width(), m.height(), m.count()), (3, 2, 2));
    /// ```
    pub fn from_ascii(picture: &str) -> Result<Self> {
        let rows: Vec<&str> = picture
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut data = Vec::with_capacity(width * height);
        for row in &rows {
            if row.chars().count() != width {
                return Err(Error::InvalidParam("ragged ascii mask".into()));
            }
            data.extend(row.chars().map(|c| c == '#' || c == '1'));
        }
        Self::from_vec(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as background.
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            false
        } else {
            self.data[y as usize * self.width + x as usize]
        }
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    /// Number of text pixels.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn not(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| !b).collect(),
        }
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a || b)
    }

    /// Number of pixels set in both masks.
    pub fn intersection_count(&self, other: &Self) -> Result<usize> {
        check_dims(self.dims(), other.dims())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .filter(|(&a, &b)| a && b)
            .count())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        check_dims(self.dims(), other.dims())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{}", self.width, self.height)?;
        for row in self.data.chunks(self.width) {
            let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Ground-truth pixel class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextClass {
    NonText,
    /// Text inside speech balloons.
    Easy,
    /// Text outside balloons: sound effects, lettering drawn into the artwork.
    Hard,
}

impl TextClass {
    pub fn is_text(self) -> bool {
        self != TextClass::NonText
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TextClass::NonText => "nontext",
            TextClass::Easy => "easy",
            TextClass::Hard => "hard",
        }
    }
}

/// Three-class ground truth mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMask {
    width: usize,
    height: usize,
    data: Vec<TextClass>,
}

impl ClassMask {
    pub fn from_vec(width: usize, height: usize, data: Vec<TextClass>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height {
            return Err(Error::BadLength {
                len: data.len(),
                width,
                height,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Marks every text pixel of `mask` with `class`.
    pub fn from_binary(mask: &BinaryMask, class: TextClass) -> Self {
        Self {
            width: mask.width,
            height: mask.height,
            data: mask
                .data
                .iter()
                .map(|&b| if b { class } else { TextClass::NonText })
                .collect(),
        }
    }

    /// Parses `.` = non-text, `e` = easy, `h` = hard.
    pub fn from_ascii(picture: &str) -> Result<Self> {
        let rows: Vec<&str> = picture
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut data = Vec::with_capacity(width * height);
        for row in &rows {
            if row.chars().count() != width {
                return Err(Error::InvalidParam("ragged ascii mask".into()));
            }
            for c in row.chars() {
                data.push(match c {
                    'e' | 'E' => TextClass::Easy,
                    'h' | 'H' => TextClass::Hard,
                    _ => TextClass::NonText,
                });
            }
        }
        Self::from_vec(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[TextClass] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> TextClass {
        self.data[y * self.width + x]
    }

    /// Easy ∪ Hard projected to a binary mask.
    pub fn text_mask(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|c| c.is_text()).collect(),
        }
    }
}

/// Per-pixel component labels; 0 is background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    n_components: u32,
}

impl LabelMap {
    /// Wraps raw labels. `n_components` is taken as the largest label present.
    pub fn from_vec(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if labels.len() != width * height {
            return Err(Error::BadLength {
                len: labels.len(),
                width,
                height,
            });
        }
        let n_components = labels.iter().copied().max().unwrap_or(0);
        Ok(Self {
            width,
            height,
            labels,
            n_components,
        })
    }

    pub(crate) fn from_parts(width: usize, height: usize, labels: Vec<u32>, n: u32) -> Self {
        debug_assert_eq!(labels.len(), width * height);
        Self {
            width,
            height,
            labels,
            n_components: n,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn n_components(&self) -> u32 {
        self.n_components
    }

    /// Pixels with a nonzero label.
    pub fn foreground(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.labels.iter().map(|&l| l != 0).collect(),
        }
    }

    pub fn component_mask(&self, label: u32) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.labels.iter().map(|&l| l == label).collect(),
        }
    }

    /// Flat pixel indices of each label, indexed by `label - 1`.
    pub fn pixel_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_components as usize];
        for (i, &l) in self.labels.iter().enumerate() {
            if l != 0 {
                out[l as usize - 1].push(i);
            }
        }
        out
    }
}

/// Axis-aligned box in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BBox {
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub label: u32,
    pub area: usize,
    pub bbox: BBox,
}

/// Labels the 8-connected components of `mask`.
///
/// Labels are assigned in raster order of each component's first pixel, so
/// the output is fully determined by the input.
pub fn connected_components(mask: &BinaryMask) -> LabelMap {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.data[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if mask.data[j] && labels[j] == 0 {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
    }
    LabelMap::from_parts(w, h, labels, next)
}

/// Erosion with the cross structuring element, repeated `iterations` times.
pub fn erode(mask: &BinaryMask, iterations: usize) -> BinaryMask {
    let mut cur = mask.clone();
    for _ in 0..iterations {
        cur = morph_step(&cur, true);
    }
    cur
}

/// Dilation with the cross structuring element, repeated `iterations` times.
pub fn dilate(mask: &BinaryMask, iterations: usize) -> BinaryMask {
    let mut cur = mask.clone();
    for _ in 0..iterations {
        cur = morph_step(&cur, false);
    }
    cur
}

fn morph_step(mask: &BinaryMask, erode: bool) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let centre = mask.get(x, y);
            let v = if erode {
                centre
                    && NEIGHBORS_4
                        .iter()
                        .all(|&(dx, dy)| mask.get_signed(x as isize + dx, y as isize + dy))
            } else {
                centre
                    || NEIGHBORS_4
                        .iter()
                        .any(|&(dx, dy)| mask.get_signed(x as isize + dx, y as isize + dy))
            };
            out.data[y * w + x] = v;
        }
    }
    out
}

/// Per-pixel probability grid with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ProbMap {
    pub fn from_vec(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if values.len() != width * height {
            return Err(Error::BadLength {
                len: values.len(),
                width,
                height,
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfRange { index, value });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Hard 0/1 probabilities from a mask.
    pub fn from_mask(mask: &BinaryMask) -> Self {
        Self {
            width: mask.width,
            height: mask.height,
            values: mask.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Text where probability is strictly greater than `threshold`.
pub fn binarize(prob: &ProbMap, threshold: f64) -> Result<BinaryMask> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParam(format!(
            "threshold {threshold} must lie in (0, 1)"
        )));
    }
    Ok(BinaryMask {
        width: prob.width,
        height: prob.height,
        data: prob.values.iter().map(|&v| v > threshold).collect(),
    })
}

/// Area and tight bounding box of every component, sorted by label.
pub fn component_stats(labels: &LabelMap) -> Vec<ComponentStats> {
    let n = labels.n_components as usize;
    let w = labels.width;
    let mut area = vec![0usize; n];
    let mut min = vec![(usize::MAX, usize::MAX); n];
    let mut max = vec![(0usize, 0usize); n];
    for (i, &l) in labels.labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let k = l as usize - 1;
        let (x, y) = (i % w, i / w);
        area[k] += 1;
        min[k] = (min[k].0.min(x), min[k].1.min(y));
        max[k] = (max[k].0.max(x), max[k].1.max(y));
    }
    (0..n)
        .filter(|&k| area[k] > 0)
        .map(|k| ComponentStats {
            label: k as u32 + 1,
            area: area[k],
            bbox: BBox {
                x: min[k].0,
                y: min[k].1,
                w: max[k].0 - min[k].0 + 1,
                h: max[k].1 - min[k].1 + 1,
            },
        })
        .collect()
}
