//! Assignment of prediction pixels to ground-truth components.
//!
//! Prediction pixels lying on a ground-truth component seed that component.
//! The remaining prediction pixels are flooded outward from the seeds through
//! the prediction foreground, one 8-connected hop at a time. A pixel reached
//! by several components at the same hop distance goes to the smallest label.
//! This is a watershed on the seed distance transform: it has no parameters
//! and splits a detection that spans two characters at the midpoint.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Result};
use crate::mask::{connected_components, dilate, erode, BinaryMask, LabelMap, NEIGHBORS_8};

/// Labels every prediction pixel with the ground-truth component it is
/// attributed to, or 0 when no seed reaches it.
pub fn watershed_assign(gt_labels: &LabelMap, pred: &BinaryMask) -> Result<LabelMap> {
    check_dims(gt_labels.dims(), pred.dims())?;
    let (w, h) = pred.dims();
    let gt = gt_labels.labels();
    let fg = pred.data();
    let mut out = vec![0u32; w * h];
    let mut frontier = Vec::new();
    for i in 0..w * h {
        if fg[i] && gt[i] != 0 {
            out[i] = gt[i];
            frontier.push(i);
        }
    }
    // level-synchronous flood; `pending` holds the best label seen for each
    // pixel of the next level
    let mut pending = vec![0u32; w * h];
    let mut next = Vec::new();
    while !frontier.is_empty() {
        for &i in &frontier {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            let label = out[i];
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !fg[j] || out[j] != 0 {
                    continue;
                }
                if pending[j] == 0 {
                    next.push(j);
                    pending[j] = label;
                } else if label < pending[j] {
                    pending[j] = label;
                }
            }
        }
        for &j in &next {
            out[j] = pending[j];
            pending[j] = 0;
        }
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    Ok(LabelMap::from_parts(w, h, out, gt_labels.n_components()))
}

/// Per-component pixel sets used by one evaluation mode.
///
/// Each view is indexed by `label - 1` and holds flat pixel indices. Views of
/// different components may overlap (dilations of neighbouring characters), so
/// they are not stored as a label map.
#[derive(Clone, Debug)]
pub struct GtViews {
    labels: LabelMap,
    cov: Vec<Vec<usize>>,
    acc: Vec<Vec<usize>>,
    match_test: Vec<Vec<usize>>,
}

impl GtViews {
    /// Coverage and accuracy against the raw components. The match test uses
    /// the components eroded by `iterations`.
    pub fn normal(labels: LabelMap, iterations: usize) -> Self {
        let original = labels.pixel_lists();
        let eroded = per_component(&labels, iterations, Morph::Erode);
        Self {
            labels,
            cov: original.clone(),
            acc: original,
            match_test: eroded,
        }
    }

    /// Coverage against eroded components, accuracy against dilated ones,
    /// match test against the eroded ones.
    pub fn relaxed(labels: LabelMap, iterations: usize) -> Self {
        let eroded = per_component(&labels, iterations, Morph::Erode);
        let dilated = per_component(&labels, iterations, Morph::Dilate);
        Self {
            labels,
            cov: eroded.clone(),
            acc: dilated,
            match_test: eroded,
        }
    }

    /// Arbitrary views. Each list must have one entry per label.
    pub fn custom(
        labels: LabelMap,
        cov: Vec<Vec<usize>>,
        acc: Vec<Vec<usize>>,
        match_test: Vec<Vec<usize>>,
    ) -> Self {
        let n = labels.n_components() as usize;
        assert!(cov.len() == n && acc.len() == n && match_test.len() == n);
        Self {
            labels,
            cov,
            acc,
            match_test,
        }
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn cov_view(&self, label: u32) -> &[usize] {
        &self.cov[label as usize - 1]
    }

    pub fn acc_view(&self, label: u32) -> &[usize] {
        &self.acc[label as usize - 1]
    }

    pub fn match_view(&self, label: u32) -> &[usize] {
        &self.match_test[label as usize - 1]
    }

    /// Union of all coverage views.
    pub fn cov_union(&self) -> BinaryMask {
        union_of(&self.labels, &self.cov, |_| true)
    }

    /// Union of all accuracy views.
    pub fn acc_union(&self) -> BinaryMask {
        union_of(&self.labels, &self.acc, |_| true)
    }

    pub fn cov_union_where(&self, keep: impl Fn(u32) -> bool) -> BinaryMask {
        union_of(&self.labels, &self.cov, keep)
    }

    pub fn acc_union_where(&self, keep: impl Fn(u32) -> bool) -> BinaryMask {
        union_of(&self.labels, &self.acc, keep)
    }
}

fn union_of(labels: &LabelMap, views: &[Vec<usize>], keep: impl Fn(u32) -> bool) -> BinaryMask {
    let (w, h) = labels.dims();
    let mut data = vec![false; w * h];
    for (k, view) in views.iter().enumerate() {
        if keep(k as u32 + 1) {
            for &i in view {
                data[i] = true;
            }
        }
    }
    BinaryMask::from_vec(w, h, data).expect("dims come from a valid label map")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Morph {
    Erode,
    Dilate,
}

/// Applies morphology to each component in isolation. An erosion that would
/// leave a component empty falls back to the original pixels so thin strokes
/// stay matchable.
fn per_component(labels: &LabelMap, iterations: usize, op: Morph) -> Vec<Vec<usize>> {
    let (w, h) = labels.dims();
    let pixels = labels.pixel_lists();
    let pad = iterations + 1;
    pixels
        .into_iter()
        .enumerate()
        .map(|(k, px)| {
            if px.is_empty() || iterations == 0 {
                return px;
            }
            let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
            for &i in &px {
                let (x, y) = (i % w, i / w);
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
            // local window; for erosion the window edge only coincides with a
            // component pixel at the image border, where outside is background
            // anyway
            let (wx0, wy0) = (x0.saturating_sub(pad), y0.saturating_sub(pad));
            let (wx1, wy1) = ((x1 + pad).min(w - 1), (y1 + pad).min(h - 1));
            let (lw, lh) = (wx1 - wx0 + 1, wy1 - wy0 + 1);
            let label = k as u32 + 1;
            let local = BinaryMask::from_fn(lw, lh, |x, y| labels.get(wx0 + x, wy0 + y) == label);
            let result = match op {
                Morph::Erode => erode(&local, iterations),
                Morph::Dilate => dilate(&local, iterations),
            };
            if result.is_empty() {
                return px;
            }
            let mut out = Vec::with_capacity(result.count());
            for y in 0..lh {
                for x in 0..lw {
                    if result.get(x, y) {
                        out.push((wy0 + y) * w + wx0 + x);
                    }
                }
            }
            out
        })
        .collect()
}

/// Outcome for one ground-truth component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtMatch {
    pub gt_label: u32,
    pub matched: bool,
    /// Pixels of the accuracy view inside the assigned region.
    pub intersection_area: usize,
    /// Size of the prediction region assigned to this component.
    pub assigned_pred_area: usize,
    /// Pixels of the coverage view inside the assigned region.
    pub cov_intersection: usize,
    pub cov_area: usize,
    pub cov: f64,
    pub acc: f64,
}

/// Component-level matching of one image pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub per_gt: Vec<GtMatch>,
    pub tp: usize,
    pub fp: usize,
    /// Number of ground-truth components.
    pub m: usize,
    /// Number of prediction components.
    pub n_detections: usize,
}

/// Matches a prediction against ground truth under the given views.
///
/// A component counts as found when its assigned prediction region touches
/// its match-test view. A prediction component is a false positive when none
/// of its pixels were assigned to any ground-truth component.
pub fn match_components(views: &GtViews, pred: &BinaryMask) -> Result<MatchResult> {
    let assignment = watershed_assign(&views.labels, pred)?;
    Ok(match_with_assignment(views, pred, &assignment))
}

pub(crate) fn match_with_assignment(
    views: &GtViews,
    pred: &BinaryMask,
    assignment: &LabelMap,
) -> MatchResult {
    let assigned = assignment.labels();
    let n = views.labels.n_components() as usize;
    let mut region_area = vec![0usize; n];
    for &l in assigned {
        if l != 0 {
            region_area[l as usize - 1] += 1;
        }
    }
    let hits = |view: &[usize], label: u32| view.iter().filter(|&&i| assigned[i] == label).count();

    let per_gt: Vec<GtMatch> = (1..=n as u32)
        .map(|label| {
            let k = label as usize - 1;
            let d_area = region_area[k];
            let cov_view = views.cov_view(label);
            let acc_i = hits(views.acc_view(label), label);
            let cov_i = hits(cov_view, label);
            let matched = d_area > 0 && hits(views.match_view(label), label) > 0;
            GtMatch {
                gt_label: label,
                matched,
                intersection_area: acc_i,
                assigned_pred_area: d_area,
                cov_intersection: cov_i,
                cov_area: cov_view.len(),
                cov: ratio(cov_i, cov_view.len()),
                acc: ratio(acc_i, d_area),
            }
        })
        .collect();

    let pred_cc = connected_components(pred);
    let n_det = pred_cc.n_components() as usize;
    let mut touched = vec![false; n_det];
    for (&p, &a) in pred_cc.labels().iter().zip(assigned) {
        if p != 0 && a != 0 {
            touched[p as usize - 1] = true;
        }
    }
    MatchResult {
        tp: per_gt.iter().filter(|g| g.matched).count(),
        fp: touched.iter().filter(|&&t| !t).count(),
        m: n,
        n_detections: n_det,
        per_gt,
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
