//! Shared inputs for the criterion benches.

use vprompt_core::synthetic::{textured_square_clip, SquareClipSpec, SyntheticClip};
use vprompt_core::{synthesize_prompt, PromptKind, PromptLayer, PromptStyle};

/// Square clip of `frames` frames at `size`×`size`, object a quarter of the side.
pub fn square_clip(size: u32, frames: usize) -> SyntheticClip {
    let spec = SquareClipSpec {
        width: size,
        height: size,
        frames,
        side: (size / 4).max(4),
        max_step: 3,
    };
    textured_square_clip(&spec, 0).expect("valid clip spec")
}

/// Prompt of `kind` drawn on frame `anchor` of `clip`.
pub fn prompt_on(clip: &SyntheticClip, kind: PromptKind, anchor: usize) -> PromptLayer {
    let mask = &clip.masks[anchor];
    let style = PromptStyle::for_dims(mask.width(), mask.height());
    synthesize_prompt(mask, kind, &style, 0)
        .expect("square masks are never degenerate")
        .with_anchor_frame(anchor)
}
