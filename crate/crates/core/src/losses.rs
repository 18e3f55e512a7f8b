//! Reference numerics for the training objective: token cross-entropy,
//! per-pixel BCE and Dice on mask logits, and their weighted sum. Analytic
//! gradients are exposed for verification only.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::raster::BinaryMask;

pub const DEFAULT_DICE_EPS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_txt: f64,
    pub lambda_bce: f64,
    pub lambda_dice: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_txt: 1.0,
            lambda_bce: 2.0,
            lambda_dice: 0.5,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        if [self.lambda_txt, self.lambda_bce, self.lambda_dice]
            .iter()
            .all(|w| w.is_finite() && *w >= 0.0)
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig("loss weights must be finite and non-negative".into()))
        }
    }
}

/// Pre-sigmoid mask predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskLogits {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl MaskLogits {
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        let n = width as usize * height as usize;
        if values.len() != n {
            return Err(Error::LengthMismatch {
                context: "MaskLogits::new",
                expected: n,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract {
                context: "MaskLogits::new",
                message: "logits must be finite".into(),
            });
        }
        Ok(Self { width, height, values })
    }

    pub fn filled(width: u32, height: u32, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean of `-log_softmax(row)[target]` over rows whose target is not
/// `ignore_index`.
pub fn cross_entropy_tokens(logits: &[Vec<f64>], targets: &[i64], ignore_index: i64) -> Result<f64> {
    if logits.len() != targets.len() {
        return Err(Error::LengthMismatch {
            context: "cross_entropy_tokens",
            expected: targets.len(),
            found: logits.len(),
        });
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (row, &t) in logits.iter().zip(targets) {
        if t == ignore_index {
            continue;
        }
        if t < 0 || t as usize >= row.len() {
            return Err(Error::Contract {
                context: "cross_entropy_tokens",
                message: format!("target {t} outside vocabulary of {}", row.len()),
            });
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        total += lse - row[t as usize];
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoTargets);
    }
    Ok(total / count as f64)
}

fn targets(logits: &MaskLogits, target: &BinaryMask, context: &'static str) -> Result<Vec<f64>> {
    check_dims(context, target.dims(), logits.dims())?;
    Ok(target.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
}

/// Mean per-pixel binary cross-entropy, `max(z, 0) - z t + ln(1 + e^-|z|)`.
pub fn bce_mask(logits: &MaskLogits, target: &BinaryMask) -> Result<f64> {
    let t = targets(logits, target, "bce_mask")?;
    let sum: f64 = logits
        .values
        .iter()
        .zip(&t)
        .map(|(&z, &t)| z.max(0.0) - z * t + (-z.abs()).exp().ln_1p())
        .sum();
    Ok(sum / t.len() as f64)
}

/// Gradient of [`bce_mask`] with respect to each logit.
pub fn bce_mask_grad(logits: &MaskLogits, target: &BinaryMask) -> Result<Vec<f64>> {
    let t = targets(logits, target, "bce_mask_grad")?;
    let n = t.len() as f64;
    Ok(logits.values.iter().zip(&t).map(|(&z, &t)| (sigmoid(z) - t) / n).collect())
}

/// `1 - (2 sum(p t) + eps) / (sum(p) + sum(t) + eps)` with `p = sigmoid(z)`.
pub fn dice_loss(logits: &MaskLogits, target: &BinaryMask, eps: f64) -> Result<f64> {
    let t = targets(logits, target, "dice_loss")?;
    let p: Vec<f64> = logits.values.iter().map(|&z| sigmoid(z)).collect();
    let inter: f64 = p.iter().zip(&t).map(|(p, t)| p * t).sum();
    let denom = p.iter().sum::<f64>() + t.iter().sum::<f64>() + eps;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - (2.0 * inter + eps) / denom)
}

/// Gradient of [`dice_loss`] with respect to each logit.
pub fn dice_loss_grad(logits: &MaskLogits, target: &BinaryMask, eps: f64) -> Result<Vec<f64>> {
    let t = targets(logits, target, "dice_loss_grad")?;
    let p: Vec<f64> = logits.values.iter().map(|&z| sigmoid(z)).collect();
    let num = 2.0 * p.iter().zip(&t).map(|(p, t)| p * t).sum::<f64>() + eps;
    let denom = p.iter().sum::<f64>() + t.iter().sum::<f64>() + eps;
    if denom == 0.0 {
        return Ok(vec![0.0; p.len()]);
    }
    Ok(p.iter()
        .zip(&t)
        .map(|(&p, &t)| {
            let d_dp = -(2.0 * t * denom - num) / (denom * denom);
            d_dp * p * (1.0 - p)
        })
        .collect())
}

pub fn total_loss(l_txt: f64, l_bce: f64, l_dice: f64, w: &LossWeights) -> f64 {
    w.lambda_txt * l_txt + w.lambda_bce * l_bce + w.lambda_dice * l_dice
}
