use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;

use vprompt_core::io::{read_clip_dir, read_layer, read_layer_dir, read_mask, read_mask_dir, write_clip_dir, write_layer, write_layer_dir};
use vprompt_core::{
    overlay_video, propagate_with, random_prompt_kind, synthesize_prompt, validate_prompt, Error, LkTracker,
    PromptKind, PromptStyle, PropagationConfig, PropagationMode, RedrawMode, Result,
};

use super::{Context, Outcome};
use crate::config::FileConfig;

pub fn parse_kind(s: &str) -> Result<PromptKind> {
    s.parse().map_err(|e: vprompt_core::synth::UnknownKind| Error::InvalidConfig(e.to_string()))
}

fn parse_color(s: &str) -> Result<[u8; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::InvalidConfig(format!("color must be r,g,b with values 0-255, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut rgb = [0u8; 3];
    for (c, p) in rgb.iter_mut().zip(parts) {
        *c = p.parse().map_err(|_| bad())?;
    }
    Ok(rgb)
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Binary mask PNG; any nonzero value is foreground.
    #[arg(long)]
    pub mask: PathBuf,
    /// One of the eight kinds, or `random`.
    #[arg(long, default_value = "random")]
    pub kind: String,
    /// Output RGBA PNG.
    #[arg(long)]
    pub out: PathBuf,
    /// Mark color as r,g,b.
    #[arg(long)]
    pub color: Option<String>,
    #[arg(long)]
    pub stroke_width: Option<u32>,
}

fn resolve_style(ctx: &Context, dims: (u32, u32), color: Option<&str>, stroke_width: Option<u32>) -> Result<PromptStyle> {
    let mut style = ctx.file.style.unwrap_or_else(|| PromptStyle::for_dims(dims.0, dims.1));
    if let Some(c) = color {
        style.color = parse_color(c)?;
    }
    if let Some(w) = stroke_width {
        style.stroke_width = w;
    }
    style.validate()?;
    Ok(style)
}

pub fn synth(ctx: &Context, a: &SynthArgs) -> Result<Outcome> {
    let mask = read_mask(&a.mask)?;
    let style = resolve_style(ctx, mask.dims(), a.color.as_deref(), a.stroke_width)?;
    let kind = if a.kind.eq_ignore_ascii_case("random") {
        random_prompt_kind(ctx.seed)
    } else {
        parse_kind(&a.kind)?
    };
    let layer = synthesize_prompt(&mask, kind, &style, ctx.seed)?;
    write_layer(&a.out, &layer)?;
    let report = validate_prompt(&layer, &mask, kind, &style);
    let config = FileConfig {
        seed: Some(ctx.seed),
        style: Some(style),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({
            "kind": kind,
            "out": a.out,
            "marked_pixels": layer.marked_count(),
            "valid": report.valid,
            "violations": report.violations,
        }),
        config,
        vec![a.mask.clone()],
    ))
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Stom,
    None,
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum RedrawArg {
    Circle,
    Shape,
}

#[derive(Args, Debug)]
pub struct PropagateArgs {
    /// Directory of numbered RGB frames.
    #[arg(long)]
    pub frames: PathBuf,
    /// RGBA prompt layer authored at the anchor frame.
    #[arg(long)]
    pub prompt: PathBuf,
    #[arg(long)]
    pub anchor: usize,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub redraw: Option<RedrawArg>,
    /// Kind of the authored prompt; required by oracle mode.
    #[arg(long)]
    pub kind: Option<String>,
    /// Ground-truth mask directory for oracle mode.
    #[arg(long)]
    pub oracle_masks: Option<PathBuf>,
    #[arg(long)]
    pub out_layers: PathBuf,
    #[arg(long)]
    pub out_overlay: Option<PathBuf>,
    /// Per-frame diagnostics; defaults to `<out-layers>/propagation.json`.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Also write the tracked points as JSON.
    #[arg(long)]
    pub tracks: Option<PathBuf>,
}

pub fn propagate(ctx: &Context, a: &PropagateArgs) -> Result<Outcome> {
    let clip = read_clip_dir(&a.frames)?;
    let mut layer = read_layer(&a.prompt)?.with_anchor_frame(a.anchor);
    if let Some(k) = &a.kind {
        layer = layer.with_kind(Some(parse_kind(k)?));
    }
    let (w, h) = clip.dims();
    let mut cfg = ctx.file.propagation.unwrap_or(PropagationConfig {
        style: PromptStyle::for_dims(w, h),
        ..Default::default()
    });
    if let Some(style) = ctx.file.style {
        cfg.style = style;
    }
    if let Some(m) = a.mode {
        cfg.mode = match m {
            ModeArg::Stom => PropagationMode::Stom,
            ModeArg::None => PropagationMode::NoPropagation,
            ModeArg::Oracle => PropagationMode::OracleMasks,
        };
    }
    if let Some(r) = a.redraw {
        cfg.redraw = match r {
            RedrawArg::Circle => RedrawMode::Circle,
            RedrawArg::Shape => RedrawMode::OriginalShapeTranslated,
        };
    }
    cfg.seed = ctx.seed;

    let mut inputs = vec![a.frames.clone(), a.prompt.clone()];
    let masks = match &a.oracle_masks {
        Some(dir) => {
            inputs.push(dir.clone());
            Some(read_mask_dir(dir)?)
        }
        None => None,
    };
    let p = propagate_with(&clip, &layer, a.anchor, &cfg, &LkTracker::new(cfg.tracker), masks.as_deref())?;

    write_layer_dir(&a.out_layers, &p.layers)?;
    if let Some(dir) = &a.out_overlay {
        let blended = overlay_video(&clip, &p.layers)?;
        write_clip_dir(dir, blended.frames())?;
    }
    let sidecar_path = a.sidecar.clone().unwrap_or_else(|| a.out_layers.join("propagation.json"));
    let sidecar = json!({
        "mode": cfg.mode,
        "redraw": cfg.redraw,
        "anchor": a.anchor,
        "frames": p.diagnostics,
    });
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)? + "\n")
        .map_err(|e| Error::io(&sidecar_path, e))?;
    if let Some(path) = &a.tracks {
        let tracked = p.tracked.as_ref().ok_or(Error::Contract {
            context: "propagate --tracks",
            message: "only stom mode tracks points".into(),
        })?;
        std::fs::write(path, tracked.to_json()?).map_err(|e| Error::io(path, e))?;
    }

    let lost: Vec<usize> = p.diagnostics.iter().filter(|d| d.lost).map(|d| d.frame).collect();
    let visible: Vec<Option<f64>> = p.diagnostics.iter().map(|d| d.visible_fraction).collect();
    let config = FileConfig {
        seed: Some(ctx.seed),
        propagation: Some(cfg),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({
            "frames": clip.len(),
            "anchor": a.anchor,
            "mode": cfg.mode,
            "redraw": cfg.redraw,
            "num_points": p.tracked.as_ref().map(|t| t.num_points()),
            "visible_fraction": visible,
            "lost_frames": lost,
            "sidecar": sidecar_path,
        }),
        config,
        inputs,
    ))
}

#[derive(Args, Debug)]
pub struct OverlayArgs {
    #[arg(long)]
    pub frames: PathBuf,
    #[arg(long)]
    pub layers: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn overlay(ctx: &Context, a: &OverlayArgs) -> Result<Outcome> {
    let clip = read_clip_dir(&a.frames)?;
    let layers = read_layer_dir(&a.layers)?;
    let blended = overlay_video(&clip, &layers)?;
    write_clip_dir(&a.out, blended.frames())?;
    let config = FileConfig {
        seed: Some(ctx.seed),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({ "frames": blended.len(), "out": a.out }),
        config,
        vec![a.frames.clone(), a.layers.clone()],
    ))
}
