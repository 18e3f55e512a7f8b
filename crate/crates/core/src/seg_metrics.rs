//! Video segmentation metrics: region similarity J, contour accuracy F,
//! their mean, and the robustness score R on absent-target samples.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::raster::BinaryMask;

/// Intersection over union. Two empty masks score 1.
pub fn region_similarity_j(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    check_dims("region_similarity_j", gt.dims(), pred.dims())?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        inter += (p && g) as usize;
        union += (p || g) as usize;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// `max(1, round(0.008 * diagonal))`.
pub fn default_tolerance(width: u32, height: u32) -> u32 {
    let diag = ((width as f64).powi(2) + (height as f64).powi(2)).sqrt();
    ((0.008 * diag).round() as u32).max(1)
}

/// Marks every pixel within `tolerance` (Euclidean) of a set pixel.
fn dilate(mask: &BinaryMask, tolerance: u32) -> BinaryMask {
    let t = tolerance as i64;
    let offsets: Vec<(i64, i64)> = (-t..=t)
        .flat_map(|dy| (-t..=t).map(move |dx| (dx, dy)))
        .filter(|(dx, dy)| dx * dx + dy * dy <= t * t)
        .collect();
    let (w, h) = mask.dims();
    let mut out = BinaryMask::empty(w, h);
    for (x, y) in mask.iter_set() {
        for &(dx, dy) in &offsets {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                out.set(nx as u32, ny as u32, true);
            }
        }
    }
    out
}

fn matched_fraction(boundary: &BinaryMask, other_dilated: &BinaryMask) -> f64 {
    let total = boundary.count();
    let hit = boundary.iter_set().filter(|&(x, y)| other_dilated.get(x, y)).count();
    hit as f64 / total as f64
}

/// Boundary F-measure. A boundary pixel counts as matched when a boundary
/// pixel of the other mask lies within `tolerance` pixels. Both boundaries
/// empty gives 1, exactly one empty gives 0.
pub fn contour_accuracy_f(pred: &BinaryMask, gt: &BinaryMask, tolerance: u32) -> Result<f64> {
    check_dims("contour_accuracy_f", gt.dims(), pred.dims())?;
    let pb = pred.boundary();
    let gb = gt.boundary();
    match (pb.is_empty(), gb.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let precision = matched_fraction(&pb, &dilate(&gb, tolerance));
    let recall = matched_fraction(&gb, &dilate(&pb, tolerance));
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceScore {
    pub j: f64,
    pub f: f64,
}

/// Per-frame J and F averaged over the sequence. `tolerance` defaults to
/// [`default_tolerance`] for the mask size.
pub fn evaluate_sequence(pred: &[BinaryMask], gt: &[BinaryMask], tolerance: Option<u32>) -> Result<SequenceScore> {
    if gt.is_empty() {
        return Err(Error::EmptySequence);
    }
    if pred.len() != gt.len() {
        return Err(Error::LengthMismatch {
            context: "evaluate_sequence",
            expected: gt.len(),
            found: pred.len(),
        });
    }
    let (w, h) = gt[0].dims();
    let tol = tolerance.unwrap_or_else(|| default_tolerance(w, h));
    let (mut j, mut f) = (0.0, 0.0);
    for (p, g) in pred.iter().zip(gt) {
        j += region_similarity_j(p, g)?;
        f += contour_accuracy_f(p, g, tol)?;
    }
    let n = gt.len() as f64;
    Ok(SequenceScore { j: j / n, f: f / n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegEvalResult {
    pub j: f64,
    pub f: f64,
    pub jf: f64,
    pub per_sequence: BTreeMap<String, SequenceScore>,
}

/// Mean of per-sequence scores, sequences visited in id order.
pub fn evaluate_dataset(
    sequences: &BTreeMap<String, (Vec<BinaryMask>, Vec<BinaryMask>)>,
    tolerance: Option<u32>,
) -> Result<SegEvalResult> {
    if sequences.is_empty() {
        return Err(Error::EmptySequence);
    }
    let scores = sequences
        .par_iter()
        .map(|(id, (pred, gt))| evaluate_sequence(pred, gt, tolerance).map(|s| (id.clone(), s)))
        .collect::<Result<Vec<_>>>()?;
    let per_sequence: BTreeMap<String, SequenceScore> = scores.into_iter().collect();
    let n = per_sequence.len() as f64;
    let j = per_sequence.values().map(|s| s.j).sum::<f64>() / n;
    let f = per_sequence.values().map(|s| s.f).sum::<f64>() / n;
    Ok(SegEvalResult {
        j,
        f,
        jf: (j + f) / 2.0,
        per_sequence,
    })
}

#[derive(Debug, Clone)]
pub struct RobustnessSample {
    pub pred: Vec<BinaryMask>,
    pub gt: Vec<BinaryMask>,
    pub target_exists: bool,
}

/// Mean over negative samples (absent targets) of one minus the fraction of
/// predicted foreground pixels. Positive samples are ignored.
///
/// The formula is this crate's own operational definition.
pub fn robustness_r(samples: &[RobustnessSample]) -> Result<f64> {
    let mut total = 0.0;
    let mut negatives = 0usize;
    for s in samples.iter().filter(|s| !s.target_exists) {
        if s.gt.iter().any(|g| !g.is_empty()) {
            return Err(Error::Contract {
                context: "robustness_r",
                message: "negative sample has non-empty ground truth".into(),
            });
        }
        let pixels: usize = s.pred.iter().map(|p| p.bits().len()).sum();
        let fg: usize = s.pred.iter().map(BinaryMask::count).sum();
        let fraction = if pixels == 0 { 0.0 } else { fg as f64 / pixels as f64 };
        total += 1.0 - fraction;
        negatives += 1;
    }
    if negatives == 0 {
        return Err(Error::NoNegatives);
    }
    Ok(total / negatives as f64)
}
