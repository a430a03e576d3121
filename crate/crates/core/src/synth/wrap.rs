//! Pixel-width text wrapping.
//!
//! Both functions break `text` into greedy lines that fit `max_width` and
//! stop at the first line that would overflow `max_height`. Lines are broken
//! at any character, not at word boundaries. [`text_wrap_fast`] gives the
//! same result as [`text_wrap_exact`] whenever the measurer is additive
//! (the width of a concatenation is the sum of the widths) while calling it
//! far less often.

use std::cell::Cell;
use std::collections::HashMap;

/// Measures rendered text as `(width, height)` in pixels.
pub trait TextMeasurer {
    fn measure(&self, text: &str) -> (u32, u32);
}

impl<T: TextMeasurer + ?Sized> TextMeasurer for &T {
    fn measure(&self, text: &str) -> (u32, u32) {
        (**self).measure(text)
    }
}

/// Additive measurer with a width per character and a fixed line height.
#[derive(Clone, Debug)]
pub struct CharWidths {
    pub widths: HashMap<char, u32>,
    pub default_width: u32,
    pub line_height: u32,
}

impl CharWidths {
    /// Every character `width` wide.
    pub fn monospace(width: u32, line_height: u32) -> Self {
        Self {
            widths: HashMap::new(),
            default_width: width,
            line_height,
        }
    }
}

impl TextMeasurer for CharWidths {
    fn measure(&self, text: &str) -> (u32, u32) {
        let w = text
            .chars()
            .map(|c| *self.widths.get(&c).unwrap_or(&self.default_width))
            .sum();
        (w, self.line_height)
    }
}

/// Wraps a measurer and counts calls.
pub struct CountingMeasurer<M> {
    inner: M,
    calls: Cell<usize>,
}

impl<M: TextMeasurer> CountingMeasurer<M> {
    pub fn new(inner: M) -> Self {
        Self {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    pub fn reset(&self) {
        self.calls.set(0);
    }
}

impl<M: TextMeasurer> TextMeasurer for CountingMeasurer<M> {
    fn measure(&self, text: &str) -> (u32, u32) {
        self.calls.set(self.calls.get() + 1);
        self.inner.measure(text)
    }
}

fn slice(chars: &[char], i: usize, j: usize) -> String {
    chars[i..j].iter().collect()
}

/// Grows each line one character at a time, measuring the whole candidate
/// line at every step.
pub fn text_wrap_exact<M: TextMeasurer + ?Sized>(
    measurer: &M,
    text: &str,
    max_width: u32,
    max_height: u32,
) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut lines = Vec::new();
    let (mut i, mut j, mut height) = (0usize, 0usize, 0u64);
    while j <= n {
        let w = measurer.measure(&slice(&chars, i, (j + 1).min(n))).0;
        if w > max_width || j == n {
            height += measurer.measure(&slice(&chars, i, j)).1 as u64;
            if height <= max_height as u64 && j > i {
                lines.push(slice(&chars, i, j));
                i = j;
                if j == n {
                    break;
                }
            } else {
                break;
            }
        } else {
            j += 1;
        }
    }
    lines
}

/// Jumps ahead by an estimate of characters per line (from the width of
/// `'a'`), then adjusts one character at a time using per-character widths.
pub fn text_wrap_fast<M: TextMeasurer + ?Sized>(
    measurer: &M,
    text: &str,
    max_width: u32,
    max_height: u32,
) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut lines = Vec::new();
    if n == 0 {
        return lines;
    }
    let a_width = measurer.measure("a").0 as usize;
    let estimate = if a_width == 0 { n } else { max_width as usize / a_width };
    let char_width = |k: usize| measurer.measure(chars[k].encode_utf8(&mut [0u8; 4])).0 as i64;
    let max_w = max_width as i64;
    let (mut i, mut j, mut height) = (0usize, 0usize, 0u64);
    while i < n {
        i = j;
        j = n.min(i + estimate);
        let mut width = measurer.measure(&slice(&chars, i, j)).0 as i64;
        while j < n && width <= max_w {
            width += char_width(j);
            j += 1;
        }
        while width > max_w && j > i {
            j -= 1;
            width -= char_width(j);
        }
        height += measurer.measure(&slice(&chars, i, j)).1 as u64;
        if height > max_height as u64 {
            break;
        }
        if j > i {
            lines.push(slice(&chars, i, j));
        } else if i < n {
            // a single character wider than the box; nothing more fits
            break;
        }
    }
    lines
}
