//! Reference values of the segmentation losses, for checking a training stack.

use crate::error::{check_dims, Error, Result};
use crate::mask::{BinaryMask, ProbMap};

pub const DEFAULT_SMOOTH: f64 = 1e-6;
/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logs.
pub const EPS: f64 = 1e-7;

/// Soft dice score `(2·Σpg + s) / (Σp + Σg + s)`.
pub fn dice_coefficient(p: &ProbMap, gt: &BinaryMask, smooth: f64) -> Result<f64> {
    check_dims(p.dims(), gt.dims())?;
    if smooth <= 0.0 {
        return Err(Error::InvalidParam("smooth must be > 0".into()));
    }
    let (mut inter, mut sum_p, mut sum_g) = (0.0, 0.0, 0.0);
    for (&v, &g) in p.values().iter().zip(gt.data()) {
        sum_p += v;
        if g {
            inter += v;
            sum_g += 1.0;
        }
    }
    Ok((2.0 * inter + smooth) / (sum_p + sum_g + smooth))
}

/// Mean focal loss `−(1 − p_t)^γ · ln p_t` without class balancing.
pub fn focal_loss(p: &ProbMap, gt: &BinaryMask, gamma: f64) -> Result<f64> {
    check_dims(p.dims(), gt.dims())?;
    if gamma < 0.0 {
        return Err(Error::InvalidParam("gamma must be >= 0".into()));
    }
    let n = p.values().len() as f64;
    let total: f64 = p
        .values()
        .iter()
        .zip(gt.data())
        .map(|(&v, &g)| {
            let v = v.clamp(EPS, 1.0 - EPS);
            let pt = if g { v } else { 1.0 - v };
            -(1.0 - pt).powf(gamma) * pt.ln()
        })
        .sum();
    Ok(total / n)
}

/// Mean binary cross-entropy with the same clamping as [`focal_loss`].
pub fn bce(p: &ProbMap, gt: &BinaryMask) -> Result<f64> {
    check_dims(p.dims(), gt.dims())?;
    let n = p.values().len() as f64;
    let total: f64 = p
        .values()
        .iter()
        .zip(gt.data())
        .map(|(&v, &g)| {
            let v = v.clamp(EPS, 1.0 - EPS);
            if g {
                -v.ln()
            } else {
                -(1.0 - v).ln()
            }
        })
        .sum();
    Ok(total / n)
}

/// `alpha · focal(γ) − ln(dice score)`. `mix_loss(p, gt, 0.0, 1.0)` is the
/// plain log-dice loss.
pub fn mix_loss(p: &ProbMap, gt: &BinaryMask, alpha: f64, gamma: f64) -> Result<f64> {
    if alpha < 0.0 {
        return Err(Error::InvalidParam("alpha must be >= 0".into()));
    }
    let dice = dice_coefficient(p, gt, DEFAULT_SMOOTH)?;
    let focal = if alpha == 0.0 { 0.0 } else { alpha * focal_loss(p, gt, gamma)? };
    Ok(focal - dice.ln())
}
