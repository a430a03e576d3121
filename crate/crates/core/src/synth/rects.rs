use rand::Rng;
use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle, top-left corner plus size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    /// Interiors overlap; rectangles sharing only an edge do not intersect.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Shrinks every side by `pad`; `None` if nothing is left.
    pub fn inset(&self, pad: u32) -> Option<Rect> {
        if self.w <= 2 * pad || self.h <= 2 * pad {
            return None;
        }
        Some(Rect::new(self.x + pad, self.y + pad, self.w - 2 * pad, self.h - 2 * pad))
    }
}

/// Places up to `limit` pairwise non-overlapping rectangles on a
/// `width`×`height` canvas.
///
/// At most `min(2·limit, 15)` candidates are drawn. A candidate's corner is
/// uniform over the top-left 93%×90% of the canvas; its size is a percentage
/// of the canvas (usually 7–15% wide and 10–35% tall, otherwise 15–100% wide
/// and 10–50% tall), clipped to the canvas. A candidate hitting an accepted
/// rectangle may get its width halved, then its height, before it is
/// dropped.
pub fn generate_rects<R: Rng + ?Sized>(width: u32, height: u32, limit: usize, rng: &mut R) -> Vec<Rect> {
    let mut rects: Vec<Rect> = Vec::new();
    if limit == 0 || width == 0 || height == 0 {
        return rects;
    }
    let attempts = (limit * 2).min(15);
    for _ in 0..attempts {
        let x = rng.gen_range(0..=(width as f64 * 0.93) as u32);
        let y = rng.gen_range(0..=(height as f64 * 0.9) as u32);
        let (wp, hp) = if rng.gen::<f64>() < 0.8 {
            (rng.gen_range(7..=15u64), rng.gen_range(10..=35u64))
        } else {
            (rng.gen_range(15..=100u64), rng.gen_range(10..=50u64))
        };
        let w = ((wp * width as u64 / 100) as u32).min(width - x);
        let h = ((hp * height as u64 / 100) as u32).min(height - y);
        let mut r = Rect::new(x, y, w, h);
        let mut add = true;
        for rect in &rects {
            if rect.intersects(&r) && rng.gen::<f64>() < 0.5 {
                r.w /= 2;
                if rect.intersects(&r) && rng.gen::<f64>() < 0.5 {
                    r.h /= 2;
                }
            }
            if rect.intersects(&r) {
                add = false;
                break;
            }
        }
        if add && r.w > 0 && r.h > 0 {
            rects.push(r);
            if rects.len() == limit {
                break;
            }
        }
    }
    rects
}
