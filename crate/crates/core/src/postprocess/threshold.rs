use image::GrayImage;

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

/// Standard deviation used for a Gaussian window of `block_size` taps.
pub fn gaussian_sigma(block_size: usize) -> f64 {
    0.3 * ((block_size as f64 - 1.0) * 0.5 - 1.0) + 0.8
}

/// Normalized 1-D Gaussian weights of length `block_size`.
pub fn gaussian_kernel(block_size: usize) -> Vec<f64> {
    let sigma = gaussian_sigma(block_size);
    let r = (block_size / 2) as f64;
    let raw: Vec<f64> = (0..block_size)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// A pixel is foreground when it is brighter than its Gaussian-weighted local
/// mean minus `offset_c`. The image border is replicated.
pub fn adaptive_threshold(gray: &GrayImage, block_size: usize, offset_c: f64) -> Result<BinaryMask> {
    if block_size < 3 || block_size % 2 == 0 {
        return Err(Error::InvalidParam(format!(
            "block size {block_size} must be odd and >= 3"
        )));
    }
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage);
    }
    let k = gaussian_kernel(block_size);
    let r = (block_size / 2) as isize;
    let px = gray.as_raw();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut horiz = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &px[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (t, &kv) in k.iter().enumerate() {
                acc += kv * row[clamp(x as isize + t as isize - r, w)] as f64;
            }
            horiz[y * w + x] = acc;
        }
    }
    let mut data = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut mean = 0.0;
            for (t, &kv) in k.iter().enumerate() {
                mean += kv * horiz[clamp(y as isize + t as isize - r, h) * w + x];
            }
            data[y * w + x] = px[y * w + x] as f64 > mean - offset_c;
        }
    }
    BinaryMask::from_vec(w, h, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Luma;

    /// Direct 2-D convolution with the outer-product kernel.
    fn oracle(gray: &GrayImage, block: usize, c: f64) -> Vec<bool> {
        let sigma = gaussian_sigma(block);
        let r = (block / 2) as i64;
        let (w, h) = (gray.width() as i64, gray.height() as i64);
        let mut weights = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                weights.push((dx, dy, (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp()));
            }
        }
        let total: f64 = weights.iter().map(|w| w.2).sum();
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                for &(dx, dy, wt) in &weights {
                    let sx = (x + dx).clamp(0, w - 1) as u32;
                    let sy = (y + dy).clamp(0, h - 1) as u32;
                    s += wt * gray.get_pixel(sx, sy).0[0] as f64;
                }
                let v = gray.get_pixel(x as u32, y as u32).0[0] as f64;
                out.push(v > s / total - c);
            }
        }
        out
    }

    #[test]
    fn sigma_for_default_block() {
        assert!((gaussian_sigma(15) - 2.6).abs() < 1e-12);
        assert!((gaussian_kernel(15).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_image_is_all_foreground() {
        let g = GrayImage::from_pixel(9, 7, Luma([120]));
        assert_eq!(adaptive_threshold(&g, 15, 30.0).unwrap().count(), 63);
    }

    #[test]
    fn step_edge_band_is_bounded() {
        let g = GrayImage::from_fn(40, 5, |x, _| Luma([if x < 20 { 40 } else { 200 }]));
        let t = adaptive_threshold(&g, 15, 30.0).unwrap();
        assert_eq!(t.data(), oracle(&g, 15, 30.0).as_slice());
        // background pixels (dark) far from the edge stay foreground, only
        // columns within half a block of the edge can flip
        for x in 0..40 {
            if !t.get(x, 2) {
                assert!((x as i64 - 20).abs() <= 7, "column {x}");
            }
        }
        assert!(!t.get(19, 2));
    }

    #[test]
    fn rejects_even_blocks() {
        let g = GrayImage::new(4, 4);
        assert!(adaptive_threshold(&g, 4, 1.0).is_err());
        assert!(adaptive_threshold(&g, 1, 1.0).is_err());
    }
}
