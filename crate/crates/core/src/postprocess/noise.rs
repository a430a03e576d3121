use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{component_stats, connected_components, BinaryMask};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Components at least this large are always kept.
    pub good_area: usize,
    /// How many neighbours in enumeration order are inspected on each side.
    pub index_window: usize,
    pub y_slack: f64,
    pub x_slack: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            good_area: 100,
            index_window: 15,
            y_slack: 10.0,
            x_slack: 20.0,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if self.good_area == 0 || self.index_window == 0 || self.y_slack <= 0.0 || self.x_slack <= 0.0 {
            return Err(Error::InvalidParam("noise parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Erases small components that have no kept component nearby.
///
/// Components are enumerated in raster order of their first pixel. A small
/// component is kept once a kept component among its `index_window`
/// predecessors or successors has an overlapping (slack-widened) box.
/// Newly kept components can vouch for others; the scan repeats until
/// nothing changes.
pub fn remove_noise(mask: &BinaryMask, params: &NoiseParams) -> Result<BinaryMask> {
    params.validate()?;
    let labels = connected_components(mask);
    let stats = component_stats(&labels);
    let n = stats.len();
    let mut good: Vec<bool> = stats.iter().map(|s| s.area >= params.good_area).collect();

    let mut changed = true;
    while changed {
        changed = false;
        for idx in 0..n {
            if good[idx] {
                continue;
            }
            let (x, y) = stats[idx].bbox.center();
            let (w, h) = (stats[idx].bbox.w as f64, stats[idx].bbox.h as f64);
            let lo = idx.saturating_sub(params.index_window);
            let hi = (idx + params.index_window).min(n);
            for a in lo..hi {
                if a == idx || !good[a] {
                    continue;
                }
                let (x2, y2) = stats[a].bbox.center();
                let (w2, h2) = (stats[a].bbox.w as f64, stats[a].bbox.h as f64);
                let close_y = (y2 - y).abs() < (h + h2) / 2.0 + params.y_slack;
                let close_x = (x2 - x).abs() < (w + w2) / 2.0 + params.x_slack;
                if close_y && close_x {
                    good[idx] = true;
                    changed = true;
                    break;
                }
            }
        }
    }

    let keep: Vec<bool> = good;
    let (w, h) = mask.dims();
    let data = labels
        .labels()
        .iter()
        .map(|&l| l != 0 && keep[l as usize - 1])
        .collect();
    BinaryMask::from_vec(w, h, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block(canvas: (usize, usize), rects: &[(usize, usize, usize, usize)]) -> BinaryMask {
        BinaryMask::from_fn(canvas.0, canvas.1, |x, y| {
            rects.iter().any(|&(rx, ry, rw, rh)| x >= rx && x < rx + rw && y >= ry && y < ry + rh)
        })
    }

    #[test]
    fn large_component_survives() {
        let m = block((40, 40), &[(5, 5, 12, 10)]);
        assert_eq!(remove_noise(&m, &NoiseParams::default()).unwrap(), m);
    }

    #[test]
    fn lone_speck_is_removed() {
        let m = block((200, 200), &[(100, 100, 2, 2)]);
        assert!(remove_noise(&m, &NoiseParams::default()).unwrap().is_empty());
    }

    #[test]
    fn speck_next_to_a_letter_is_kept() {
        // block centre (20, 20) half-extent 10; dot 5 px right of the block edge
        let m = block((80, 60), &[(10, 10, 20, 20), (35, 19, 2, 2)]);
        let out = remove_noise(&m, &NoiseParams::default()).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn kept_specks_vouch_for_further_ones() {
        // chain: block, then dots 20 px apart; each only reaches its neighbour
        let m = block(
            (200, 40),
            &[(0, 10, 10, 10), (28, 14, 2, 2), (48, 14, 2, 2), (68, 14, 2, 2), (190, 14, 2, 2)],
        );
        let out = remove_noise(&m, &NoiseParams::default()).unwrap();
        assert!(out.get(68, 14));
        assert!(!out.get(190, 14));
    }

    #[test]
    fn enumeration_window_limits_vouching() {
        let params = NoiseParams {
            index_window: 1,
            ..NoiseParams::default()
        };
        // the good block is first in raster order; the speck is third, with
        // an unrelated speck far away between them
        let m = block((300, 60), &[(0, 0, 10, 10), (250, 1, 2, 2), (14, 18, 2, 2)]);
        let out = remove_noise(&m, &params).unwrap();
        assert!(!out.get(14, 18));
        let out = remove_noise(&m, &NoiseParams::default()).unwrap();
        assert!(out.get(14, 18));
    }

    fn arb_mask() -> impl Strategy<Value = BinaryMask> {
        (10usize..60, 10usize..60, proptest::collection::vec((0usize..60, 0usize..60, 1usize..15, 1usize..15), 0..12))
            .prop_map(|(w, h, rects)| {
                BinaryMask::from_fn(w, h, |x, y| {
                    rects.iter().any(|&(rx, ry, rw, rh)| x >= rx && x < rx + rw && y >= ry && y < ry + rh)
                })
            })
    }

    proptest! {
        #[test]
        fn only_erases_and_is_idempotent(m in arb_mask()) {
            let p = NoiseParams::default();
            let once = remove_noise(&m, &p).unwrap();
            prop_assert!(once.is_subset_of(&m));
            prop_assert_eq!(remove_noise(&once, &p).unwrap(), once.clone());
            let labels = connected_components(&m);
            for s in component_stats(&labels).iter().filter(|s| s.area >= p.good_area) {
                let px = labels.labels().iter().position(|&l| l == s.label).unwrap();
                prop_assert!(once.data()[px]);
            }
        }
    }
}
