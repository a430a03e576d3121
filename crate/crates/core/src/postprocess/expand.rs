use std::collections::HashSet;

use image::GrayImage;
use serde::{Deserialize, Serialize};

use super::threshold::adaptive_threshold;
use crate::error::{check_dims, Error, Result};
use crate::mask::{component_stats, connected_components, BBox, BinaryMask};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpandParams {
    /// Odd window size of the adaptive threshold.
    pub block_size: usize,
    /// Constant subtracted from the local mean.
    pub offset_c: f64,
    /// Boxes holding this many components or more are skipped.
    pub max_components: usize,
    /// Components must be strictly larger than this.
    pub min_area: usize,
    /// Fraction of a component the mask must cover, strictly.
    pub min_overlap_frac: f64,
}

impl Default for ExpandParams {
    fn default() -> Self {
        Self {
            block_size: 15,
            offset_c: 30.0,
            max_components: 10,
            min_area: 3,
            min_overlap_frac: 0.10,
        }
    }
}

impl ExpandParams {
    pub fn validate(&self) -> Result<()> {
        if self.block_size < 3 || self.block_size % 2 == 0 {
            return Err(Error::InvalidParam("block_size must be odd and >= 3".into()));
        }
        if !(self.min_overlap_frac > 0.0 && self.min_overlap_frac < 1.0) {
            return Err(Error::InvalidParam("min_overlap_frac must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Repaints partially detected characters in full.
///
/// The page is thresholded adaptively and every foreground region yields a
/// box. Inside each box the crop is thresholded again and inverted so that
/// ink is foreground. When the crop holds fewer than `max_components`
/// components, each one larger than `min_area` whose overlap with `mask`
/// exceeds `min_overlap_frac` of its area is painted whole.
///
/// The output holds only painted components; union it with `mask` to keep
/// the original detections.
pub fn expand_partial(gray: &GrayImage, mask: &BinaryMask, params: &ExpandParams) -> Result<BinaryMask> {
    params.validate()?;
    check_dims((gray.width() as usize, gray.height() as usize), mask.dims())?;
    let page = adaptive_threshold(gray, params.block_size, params.offset_c)?;
    let mut out = BinaryMask::new(mask.width(), mask.height());
    let mut seen = HashSet::new();
    for s in component_stats(&connected_components(&page)) {
        if seen.insert(s.bbox) {
            for (bbox, comp) in painted_in_box(gray, mask, s.bbox, params)? {
                paint(&mut out, bbox, &comp);
            }
        }
    }
    Ok(out)
}

/// Components of one box that qualify for painting, in crop coordinates.
pub(crate) fn painted_in_box(
    gray: &GrayImage,
    mask: &BinaryMask,
    bbox: BBox,
    params: &ExpandParams,
) -> Result<Vec<(BBox, BinaryMask)>> {
    let crop = image::imageops::crop_imm(gray, bbox.x as u32, bbox.y as u32, bbox.w as u32, bbox.h as u32).to_image();
    let ink = adaptive_threshold(&crop, params.block_size, params.offset_c)?.not();
    let labels = connected_components(&ink);
    if labels.n_components() as usize >= params.max_components {
        return Ok(Vec::new());
    }
    let mut area = vec![0usize; labels.n_components() as usize];
    let mut hit = vec![0usize; labels.n_components() as usize];
    for y in 0..bbox.h {
        for x in 0..bbox.w {
            let l = labels.get(x, y);
            if l != 0 {
                area[l as usize - 1] += 1;
                if mask.get(bbox.x + x, bbox.y + y) {
                    hit[l as usize - 1] += 1;
                }
            }
        }
    }
    Ok((0..area.len())
        .filter(|&k| area[k] > params.min_area && hit[k] as f64 > area[k] as f64 * params.min_overlap_frac)
        .map(|k| (bbox, labels.component_mask(k as u32 + 1)))
        .collect())
}

fn paint(out: &mut BinaryMask, bbox: BBox, comp: &BinaryMask) {
    for y in 0..bbox.h {
        for x in 0..bbox.w {
            if comp.get(x, y) {
                out.set(bbox.x + x, bbox.y + y, true);
            }
        }
    }
}
