//! Visual prompt engine for object-centric video: prompt synthesis from
//! masks, point tracking and prompt propagation across a clip, alpha
//! compositing, segmentation and caption metrics, training-loss reference
//! numerics, and instruction-dataset tooling.

pub mod dataset;
mod draw;
pub mod error;
pub mod geometry;
pub mod io;
pub mod losses;
pub mod propagate;
pub mod raster;
pub mod seg_metrics;
pub mod synth;
pub mod synthetic;
pub mod text_metrics;
pub mod track;

pub use error::{Error, Result};
pub use raster::{
    alpha_blend, mask_bbox, mask_centroid, nearest_interior_point, BinaryMask, Frame, PointF, PromptLayer,
    Rect, VideoClip,
};
pub use synth::{
    random_prompt_kind, synthesize_prompt, validate_prompt, PromptKind, PromptStyle, ValidityReport,
};
pub use track::{
    lk_track_step, seed_points, track_bidirectional, LkTracker, LumaFrame, OracleTracker, SeedRadius,
    TrackedPointSet, Tracker, TrackerConfig,
};
pub use propagate::{
    oracle_propagate, overlay_video, propagate_prompt, propagate_with, redraw_layer, FrameDiagnostics,
    PropagatedPrompt, PropagationConfig, PropagationMode, RedrawMode,
};
pub use losses::{bce_mask, cross_entropy_tokens, dice_loss, total_loss, LossWeights, MaskLogits};
pub use seg_metrics::{
    contour_accuracy_f, evaluate_dataset, evaluate_sequence, region_similarity_j, robustness_r, SegEvalResult,
};
pub use text_metrics::{bleu4, cider, rouge_l, tokenize};
pub use dataset::{
    build_dataset, build_instruct_record, ingest_annotations, sample_frames, summarize_stats, validate_dataset,
    DatasetReport, InstructRecord, QaPair, Split,
};
