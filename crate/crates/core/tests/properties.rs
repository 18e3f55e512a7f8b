use proptest::prelude::*;

use vprompt_core::synthetic::{textured_square_clip, SquareClipSpec};
use vprompt_core::{
    mask_centroid, propagate_prompt, seed_points, synthesize_prompt, track_bidirectional, validate_prompt,
    BinaryMask, LkTracker, PromptKind, PromptStyle, PropagationConfig, PropagationMode, RedrawMode, TrackerConfig,
};

fn kind() -> impl Strategy<Value = PromptKind> {
    prop::sample::select(PromptKind::ALL.to_vec())
}

/// Union of up to three ellipses, each at least 3 px across.
fn blob() -> impl Strategy<Value = BinaryMask> {
    (
        40u32..80,
        40u32..80,
        prop::collection::vec((0.25f64..0.75, 0.25f64..0.75, 3.0f64..14.0, 3.0f64..14.0), 1..4),
    )
        .prop_map(|(w, h, es)| {
            BinaryMask::from_fn(w, h, |x, y| {
                es.iter().any(|&(fx, fy, rx, ry)| {
                    let (cx, cy) = (fx * w as f64, fy * h as f64);
                    ((x as f64 - cx) / rx).powi(2) + ((y as f64 - cy) / ry).powi(2) <= 1.0
                })
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn synthesized_prompts_validate(mask in blob(), kind in kind(), seed in any::<u64>()) {
        let style = PromptStyle::for_dims(mask.width(), mask.height());
        let layer = synthesize_prompt(&mask, kind, &style, seed).unwrap();
        let report = validate_prompt(&layer, &mask, kind, &style);
        prop_assert!(report.valid, "{kind:?}: {:?}", report.violations);
    }

    #[test]
    fn synthesis_alphas_and_determinism(mask in blob(), kind in kind(), seed in any::<u64>()) {
        let style = PromptStyle { fill_alpha: 90, stroke_alpha: 230, ..PromptStyle::for_dims(mask.width(), mask.height()) };
        let a = synthesize_prompt(&mask, kind, &style, seed).unwrap();
        let b = synthesize_prompt(&mask, kind, &style, seed).unwrap();
        prop_assert_eq!(a.pixels(), b.pixels());
        for px in a.pixels().chunks_exact(4) {
            prop_assert!(px[3] == 0 || px[3] == 90 || px[3] == 230);
            if px[3] == 0 {
                prop_assert_eq!(&px[..3], &[0, 0, 0]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn visibility_never_resurrects(seed in 0u64..1000, anchor in 0usize..16) {
        let spec = SquareClipSpec { frames: 16, max_step: 4, ..Default::default() };
        let s = textured_square_clip(&spec, seed).unwrap();
        let cfg = TrackerConfig::default();
        let seeds = seed_points(s.centers[anchor], 6.0, cfg.max_points);
        let t = track_bidirectional(&s.clip, &seeds, anchor, &cfg, &LkTracker::new(cfg)).unwrap();
        prop_assert!(t.visible(anchor).iter().all(|&v| v));
        prop_assert_eq!(t.positions(anchor), t.seeds());
        for i in 0..t.num_points() {
            for f in anchor + 1..t.num_frames() {
                prop_assert!(t.visible(f - 1)[i] || !t.visible(f)[i]);
                if !t.visible(f)[i] {
                    prop_assert_eq!(t.positions(f)[i], t.positions(f - 1)[i]);
                }
            }
            for f in (0..anchor).rev() {
                prop_assert!(t.visible(f + 1)[i] || !t.visible(f)[i]);
            }
        }
    }

    #[test]
    fn forward_then_backward_returns_to_seed(seed in 0u64..1000) {
        let spec = SquareClipSpec { frames: 12, ..Default::default() };
        let s = textured_square_clip(&spec, seed).unwrap();
        let cfg = TrackerConfig::default();
        let seeds = seed_points(s.centers[0], 5.0, cfg.max_points);
        let tracker = LkTracker::new(cfg);
        let fwd = track_bidirectional(&s.clip, &seeds, 0, &cfg, &tracker).unwrap();
        let last = s.clip.len() - 1;
        let ends: Vec<_> = fwd.visible_points(last).collect();
        prop_assume!(!ends.is_empty());
        let back = track_bidirectional(&s.clip, &ends, last, &cfg, &tracker).unwrap();
        let starts: Vec<_> = seeds.iter().zip(fwd.visible(last)).filter(|(_, &v)| v).map(|(p, _)| *p).collect();
        for (i, p) in back.positions(0).iter().enumerate() {
            if back.visible(0)[i] {
                prop_assert!(p.distance(starts[i]) <= 1.0, "{p:?} vs {:?}", starts[i]);
            }
        }
    }

    #[test]
    fn anchor_layer_is_never_altered(
        seed in 0u64..1000,
        anchor in 0usize..10,
        kind in kind(),
        mode in prop::sample::select(vec![PropagationMode::Stom, PropagationMode::NoPropagation]),
        redraw in prop::sample::select(vec![RedrawMode::Circle, RedrawMode::OriginalShapeTranslated]),
    ) {
        let spec = SquareClipSpec { frames: 10, ..Default::default() };
        let s = textured_square_clip(&spec, seed).unwrap();
        let style = PromptStyle::for_dims(64, 64);
        let layer = synthesize_prompt(&s.masks[anchor], kind, &style, seed).unwrap().with_anchor_frame(anchor);
        let cfg = PropagationConfig { mode, redraw, style, ..Default::default() };
        let p = propagate_prompt(&s.clip, &layer, anchor, &cfg).unwrap();
        prop_assert_eq!(p.layers.len(), s.clip.len());
        prop_assert_eq!(p.layers[anchor].pixels(), layer.pixels());
    }

    #[test]
    fn static_clip_keeps_centroid(seed in 0u64..1000, kind in kind()) {
        let spec = SquareClipSpec { frames: 6, max_step: 0, ..Default::default() };
        let s = textured_square_clip(&spec, seed).unwrap();
        let style = PromptStyle::for_dims(64, 64);
        let layer = synthesize_prompt(&s.masks[0], kind, &style, seed).unwrap();
        let authored = mask_centroid(&layer.mark_mask()).unwrap();
        let cfg = PropagationConfig {
            redraw: RedrawMode::OriginalShapeTranslated,
            style,
            ..Default::default()
        };
        let p = propagate_prompt(&s.clip, &layer, 0, &cfg).unwrap();
        for l in &p.layers {
            prop_assert!(mask_centroid(&l.mark_mask()).unwrap().distance(authored) <= 1.0);
        }
    }
}
