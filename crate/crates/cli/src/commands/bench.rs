use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;

use vprompt_core::io::{read_clip_dir, read_layer};
use vprompt_core::propagate::FramePoints;
use vprompt_core::synthetic::{textured_square_clip, SquareClipSpec};
use vprompt_core::{
    mask_bbox, mask_centroid, overlay_video, propagate_prompt, redraw_layer, seed_points, synthesize_prompt,
    track_bidirectional, Error, LkTracker, PromptKind, PromptLayer, PromptStyle, Result, VideoClip,
};

use super::{Context, Outcome};
use crate::config::FileConfig;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Frame directory; a synthetic textured-square clip is used when absent.
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Prompt layer for `--frames`.
    #[arg(long)]
    pub prompt: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub anchor: usize,
    /// Synthetic clip length.
    #[arg(long, default_value_t = 64)]
    pub num_frames: usize,
    /// Synthetic clip side in pixels.
    #[arg(long, default_value_t = 256)]
    pub size: u32,
}

fn load(ctx: &Context, a: &BenchArgs) -> Result<(VideoClip, PromptLayer)> {
    match (&a.frames, &a.prompt) {
        (Some(frames), Some(prompt)) => Ok((read_clip_dir(frames)?, read_layer(prompt)?.with_anchor_frame(a.anchor))),
        (Some(_), None) => Err(Error::Contract {
            context: "bench",
            message: "--frames needs --prompt".into(),
        }),
        (None, _) => {
            let spec = SquareClipSpec {
                width: a.size,
                height: a.size,
                frames: a.num_frames,
                side: (a.size / 4).max(4),
                max_step: 3,
            };
            let s = textured_square_clip(&spec, ctx.seed)?;
            let mask = s.masks.get(a.anchor).ok_or(Error::Contract {
                context: "bench",
                message: format!("anchor {} outside clip of {} frames", a.anchor, a.num_frames),
            })?;
            let style = PromptStyle::for_dims(a.size, a.size);
            let layer = synthesize_prompt(mask, PromptKind::Point, &style, ctx.seed)?.with_anchor_frame(a.anchor);
            Ok((s.clip, layer))
        }
    }
}

fn stage(seconds: f64, frames: usize) -> serde_json::Value {
    let fps = if seconds > 0.0 { Some(frames as f64 / seconds) } else { None };
    json!({ "seconds": seconds, "fps": fps })
}

pub fn bench(ctx: &Context, a: &BenchArgs) -> Result<Outcome> {
    let (clip, layer) = load(ctx, a)?;
    let (w, h) = clip.dims();
    let mut cfg = ctx.file.propagation.unwrap_or_default();
    if ctx.file.propagation.is_none() {
        cfg.style = PromptStyle::for_dims(w, h);
    }
    cfg.seed = ctx.seed;
    let t = clip.len();

    let start = Instant::now();
    let mark = layer.mark_mask();
    let seeds = seed_points(
        mask_centroid(&mark)?,
        cfg.tracker.radius_for(&mask_bbox(&mark)?),
        cfg.tracker.max_points,
    );
    let seed_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let tracked = track_bidirectional(&clip, &seeds, a.anchor, &cfg.tracker, &LkTracker::new(cfg.tracker))?;
    let track_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let layers: Vec<PromptLayer> = (0..t)
        .map(|f| {
            let pts = FramePoints {
                seeds: tracked.seeds(),
                positions: tracked.positions(f),
                visible: tracked.visible(f),
            };
            redraw_layer(f, pts, &layer, &cfg).0
        })
        .collect();
    let redraw_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    overlay_video(&clip, &layers)?;
    let blend_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let p = propagate_prompt(&clip, &layer, a.anchor, &cfg)?;
    overlay_video(&clip, &p.layers)?;
    let e2e_s = start.elapsed().as_secs_f64();

    let mut inputs = Vec::new();
    inputs.extend(a.frames.clone());
    inputs.extend(a.prompt.clone());
    let config = FileConfig {
        seed: Some(ctx.seed),
        jobs: Some(rayon::current_num_threads()),
        propagation: Some(cfg),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({
            "frames": t,
            "width": w,
            "height": h,
            "points": seeds.len(),
            "workers": rayon::current_num_threads(),
            "stages": {
                "seed": stage(seed_s, t),
                "track": stage(track_s, t),
                "redraw": stage(redraw_s, t),
                "blend": stage(blend_s, t),
            },
            "propagate_overlay": stage(e2e_s, t),
        }),
        config,
        inputs,
    ))
}
