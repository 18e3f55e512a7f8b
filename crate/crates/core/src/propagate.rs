//! Prompt propagation: carry a prompt authored at one frame to every frame
//! of the clip, then composite the layers onto the frames.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::draw;
use crate::error::{check_dims, Error, Result};
use crate::geometry::{min_enclosing_circle, Circle};
use crate::raster::{alpha_blend, mask_bbox, mask_centroid, BinaryMask, PointF, PromptLayer, VideoClip};
use crate::synth::{synthesize_prompt, PromptKind, PromptStyle};
use crate::track::{seed_points, track_bidirectional, LkTracker, TrackedPointSet, Tracker, TrackerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMode {
    /// Seed, track and redraw.
    #[default]
    Stom,
    /// Only the anchor frame carries a prompt.
    NoPropagation,
    /// Prompts regenerated from ground-truth masks on every frame.
    OracleMasks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedrawMode {
    #[default]
    Circle,
    OriginalShapeTranslated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    pub mode: PropagationMode,
    pub redraw: RedrawMode,
    pub min_visible_fraction: f64,
    pub tracker: TrackerConfig,
    pub style: PromptStyle,
    /// Seed for oracle-mode prompt synthesis.
    pub seed: u64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            mode: PropagationMode::Stom,
            redraw: RedrawMode::Circle,
            min_visible_fraction: 0.25,
            tracker: TrackerConfig::default(),
            style: PromptStyle::default(),
            seed: 0,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.min_visible_fraction) {
            return Err(Error::InvalidConfig(format!(
                "min_visible_fraction must lie in [0, 1], got {}",
                self.min_visible_fraction
            )));
        }
        self.tracker.validate()?;
        self.style.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDiagnostics {
    pub frame: usize,
    /// Fraction of tracked points still visible; `None` when nothing was tracked.
    pub visible_fraction: Option<f64>,
    pub circle: Option<Circle>,
    pub offset: Option<(i64, i64)>,
    /// No prompt could be drawn on this frame.
    pub lost: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedPrompt {
    pub layers: Vec<PromptLayer>,
    pub tracked: Option<TrackedPointSet>,
    pub source_kind: Option<PromptKind>,
    pub mode: PropagationMode,
    pub diagnostics: Vec<FrameDiagnostics>,
}

/// Points of one frame plus the seeds they started from.
#[derive(Debug, Clone, Copy)]
pub struct FramePoints<'a> {
    pub seeds: &'a [PointF],
    pub positions: &'a [PointF],
    pub visible: &'a [bool],
}

/// The most frequent RGBA among marked pixels, smallest value on ties.
fn dominant_rgba(layer: &PromptLayer) -> Option<[u8; 4]> {
    let mut counts: HashMap<[u8; 4], usize> = HashMap::new();
    for px in layer.pixels().chunks_exact(4) {
        if px[3] > 0 {
            *counts.entry([px[0], px[1], px[2], px[3]]).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(rgba, _)| rgba)
}

fn translate_layer(layer: &PromptLayer, dx: i64, dy: i64) -> PromptLayer {
    let (w, h) = layer.dims();
    let mut out = PromptLayer::transparent(w, h, layer.anchor_frame()).with_kind(layer.kind());
    for y in 0..h {
        for x in 0..w {
            let rgba = layer.rgba(x, y);
            if rgba[3] == 0 {
                continue;
            }
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                out.set_rgba(nx as u32, ny as u32, rgba);
            }
        }
    }
    out
}

/// Draws the prompt for one frame from its tracked points.
///
/// Below `min_visible_fraction` (or with no visible point at all) the layer
/// is fully transparent and the frame is reported lost.
pub fn redraw_layer(
    frame: usize,
    points: FramePoints<'_>,
    authored: &PromptLayer,
    cfg: &PropagationConfig,
) -> (PromptLayer, FrameDiagnostics) {
    let (w, h) = authored.dims();
    let n = points.positions.len();
    let visible: Vec<usize> = (0..n).filter(|&i| points.visible[i]).collect();
    let fraction = if n == 0 { 0.0 } else { visible.len() as f64 / n as f64 };
    let mut diag = FrameDiagnostics {
        frame,
        visible_fraction: Some(fraction),
        circle: None,
        offset: None,
        lost: true,
    };
    let blank = PromptLayer::transparent(w, h, authored.anchor_frame());
    let rgba = match dominant_rgba(authored) {
        Some(c) => c,
        None => return (blank, diag),
    };
    if visible.is_empty() || fraction < cfg.min_visible_fraction {
        return (blank, diag);
    }

    match cfg.redraw {
        RedrawMode::Circle => {
            let pts: Vec<PointF> = visible.iter().map(|&i| points.positions[i]).collect();
            let mec = min_enclosing_circle(&pts).expect("at least one visible point");
            let sw = cfg.style.stroke_width;
            let diagonal = ((w as f64).powi(2) + (h as f64).powi(2)).sqrt();
            let mut layer = blank;
            let radius = if mec.radius < 1e-9 {
                draw::fill_disc(&mut layer, mec.center, sw as f64, rgba);
                sw as f64
            } else {
                let r = mec.radius.clamp(sw as f64, 0.5 * diagonal);
                draw::draw_circle(&mut layer, mec.center, r, sw, rgba);
                r
            };
            diag.circle = Some(Circle {
                center: mec.center,
                radius,
            });
            diag.lost = layer.is_empty();
            (layer, diag)
        }
        RedrawMode::OriginalShapeTranslated => {
            let (mut sx, mut sy) = (0.0, 0.0);
            for &i in &visible {
                sx += points.positions[i].x - points.seeds[i].x;
                sy += points.positions[i].y - points.seeds[i].y;
            }
            let k = visible.len() as f64;
            let (dx, dy) = ((sx / k).round() as i64, (sy / k).round() as i64);
            let layer = translate_layer(authored, dx, dy);
            diag.offset = Some((dx, dy));
            diag.lost = layer.is_empty();
            (layer, diag)
        }
    }
}

/// Propagates `layer` with the classical tracker configured in `cfg`.
/// Oracle mode needs masks; use [`propagate_with`] for it.
pub fn propagate_prompt(
    clip: &VideoClip,
    layer: &PromptLayer,
    anchor: usize,
    cfg: &PropagationConfig,
) -> Result<PropagatedPrompt> {
    propagate_with(clip, layer, anchor, cfg, &LkTracker::new(cfg.tracker), None)
}

/// Full-control entry point: any tracker, optional ground-truth masks for
/// [`PropagationMode::OracleMasks`]. The anchor layer is always returned
/// unchanged.
pub fn propagate_with(
    clip: &VideoClip,
    layer: &PromptLayer,
    anchor: usize,
    cfg: &PropagationConfig,
    tracker: &dyn Tracker,
    masks: Option<&[BinaryMask]>,
) -> Result<PropagatedPrompt> {
    cfg.validate()?;
    check_dims("propagate_prompt", clip.dims(), layer.dims())?;
    let t = clip.len();
    if anchor >= t {
        return Err(Error::Contract {
            context: "propagate_prompt",
            message: format!("anchor {anchor} outside clip of {t} frames"),
        });
    }
    if layer.is_empty() {
        return Err(Error::EmptyMark);
    }
    let (w, h) = clip.dims();
    let source_kind = layer.kind();
    let authored = layer.clone();

    let mut out = match cfg.mode {
        PropagationMode::NoPropagation => PropagatedPrompt {
            layers: (0..t).map(|_| PromptLayer::transparent(w, h, anchor)).collect(),
            tracked: None,
            source_kind,
            mode: cfg.mode,
            diagnostics: (0..t)
                .map(|frame| FrameDiagnostics {
                    frame,
                    visible_fraction: None,
                    circle: None,
                    offset: None,
                    lost: frame != anchor,
                })
                .collect(),
        },
        PropagationMode::OracleMasks => {
            let masks = masks.ok_or(Error::Contract {
                context: "propagate_prompt",
                message: "oracle mode requires ground-truth masks".into(),
            })?;
            if masks.len() != t {
                return Err(Error::LengthMismatch {
                    context: "propagate_prompt masks",
                    expected: t,
                    found: masks.len(),
                });
            }
            let kind = source_kind.ok_or(Error::Contract {
                context: "propagate_prompt",
                message: "oracle mode requires the prompt kind on the layer".into(),
            })?;
            for m in masks {
                check_dims("propagate_prompt masks", (w, h), m.dims())?;
            }
            let mut p = oracle_propagate(masks, kind, &cfg.style, cfg.seed)?;
            p.diagnostics[anchor].lost = false;
            p
        }
        PropagationMode::Stom => {
            let mark = layer.mark_mask();
            let center = mask_centroid(&mark)?;
            let radius = cfg.tracker.radius_for(&mask_bbox(&mark)?);
            let seeds = seed_points(center, radius, cfg.tracker.max_points);
            let tracked = track_bidirectional(clip, &seeds, anchor, &cfg.tracker, tracker)?;
            let (layers, diagnostics): (Vec<_>, Vec<_>) = (0..t)
                .into_par_iter()
                .map(|f| {
                    let pts = FramePoints {
                        seeds: tracked.seeds(),
                        positions: tracked.positions(f),
                        visible: tracked.visible(f),
                    };
                    redraw_layer(f, pts, &authored, cfg)
                })
                .unzip();
            let mut diagnostics = diagnostics;
            diagnostics[anchor].lost = false;
            PropagatedPrompt {
                layers,
                tracked: Some(tracked),
                source_kind,
                mode: cfg.mode,
                diagnostics,
            }
        }
    };
    out.layers[anchor] = authored;
    Ok(out)
}

/// Synthesizes a prompt of `kind` on every frame from its ground-truth mask,
/// with the same style and seed on each frame. Frames whose mask is empty, or
/// too small for the kind, get a transparent layer.
pub fn oracle_propagate(
    masks: &[BinaryMask],
    kind: PromptKind,
    style: &PromptStyle,
    seed: u64,
) -> Result<PropagatedPrompt> {
    let first = masks.first().ok_or(Error::EmptyMask)?;
    let (w, h) = first.dims();
    for m in masks {
        check_dims("oracle_propagate", (w, h), m.dims())?;
    }
    if masks.iter().all(BinaryMask::is_empty) {
        return Err(Error::EmptyMask);
    }
    let results: Vec<Result<Option<PromptLayer>>> = masks
        .par_iter()
        .map(|m| {
            if m.is_empty() {
                return Ok(None);
            }
            match synthesize_prompt(m, kind, style, seed) {
                Ok(l) => Ok(Some(l)),
                Err(Error::DegenerateMask { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut layers = Vec::with_capacity(masks.len());
    let mut diagnostics = Vec::with_capacity(masks.len());
    for (frame, r) in results.into_iter().enumerate() {
        let layer = r?;
        diagnostics.push(FrameDiagnostics {
            frame,
            visible_fraction: None,
            circle: None,
            offset: None,
            lost: layer.is_none(),
        });
        layers.push(layer.map_or_else(|| PromptLayer::transparent(w, h, frame), |l| l.with_anchor_frame(frame)));
    }
    Ok(PropagatedPrompt {
        layers,
        tracked: None,
        source_kind: Some(kind),
        mode: PropagationMode::OracleMasks,
        diagnostics,
    })
}

/// Frame-wise [`alpha_blend`]. The input clip is left untouched.
pub fn overlay_video(clip: &VideoClip, layers: &[PromptLayer]) -> Result<VideoClip> {
    if layers.len() != clip.len() {
        return Err(Error::LengthMismatch {
            context: "overlay_video",
            expected: clip.len(),
            found: layers.len(),
        });
    }
    let frames = clip
        .frames()
        .par_iter()
        .zip(layers.par_iter())
        .map(|(f, l)| alpha_blend(f, l))
        .collect::<Result<Vec<_>>>()?;
    VideoClip::new(frames)
}
