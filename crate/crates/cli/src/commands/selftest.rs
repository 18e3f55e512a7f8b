use serde_json::json;

use vprompt_core::geometry::min_enclosing_circle;
use vprompt_core::losses::DEFAULT_DICE_EPS;
use vprompt_core::{
    alpha_blend, bce_mask, bleu4, cider, contour_accuracy_f, cross_entropy_tokens, dice_loss, region_similarity_j,
    rouge_l, seed_points, tokenize, total_loss, BinaryMask, Frame, LossWeights, MaskLogits, PointF, PromptLayer,
    Result,
};

use super::{Context, Outcome};
use crate::config::FileConfig;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn checks() -> Result<Vec<(&'static str, bool)>> {
    let mut out = Vec::new();

    let frame = Frame::filled(1, 1, [100, 100, 100], 0)?;
    let half = PromptLayer::new(1, 1, vec![200, 0, 0, 128], None, 0)?;
    let full = PromptLayer::new(1, 1, vec![200, 0, 0, 255], None, 0)?;
    out.push(("blend_half_alpha", alpha_blend(&frame, &half)?.pixel(0, 0) == [150, 50, 50]));
    out.push(("blend_full_alpha", alpha_blend(&frame, &full)?.pixel(0, 0) == [200, 0, 0]));
    out.push((
        "blend_transparent",
        alpha_blend(&frame, &PromptLayer::transparent(1, 1, 0))? == frame,
    ));

    out.push(("seed_disc_13", seed_points(PointF::new(10.0, 10.0), 2.0, 64).len() == 13));
    let mec = min_enclosing_circle(&[PointF::new(0.0, 0.0), PointF::new(3.0, 0.0), PointF::new(0.0, 4.0)]);
    out.push(("mec_right_triangle", mec.is_some_and(|c| close(c.radius, 2.5, 1e-12))));

    let left = BinaryMask::from_fn(4, 4, |x, _| x < 2);
    let top = BinaryMask::from_fn(4, 4, |_, y| y < 2);
    out.push(("j_half_overlap", close(region_similarity_j(&left, &top)?, 1.0 / 3.0, 1e-15)));
    out.push(("f_identical", contour_accuracy_f(&left, &left, 1)? == 1.0));

    let cand = tokenize("the cat sat on the mat");
    let bleu = bleu4(&cand, &[tokenize("the cat sat on a mat")]);
    out.push(("bleu4_cat_mat", close(bleu, (1.0f64 / 12.0).powf(0.25), 1e-9)));
    out.push(("bleu4_identity", close(bleu4(&cand, std::slice::from_ref(&cand)), 1.0, 1e-12)));
    out.push((
        "rouge_l_cat_dog",
        close(rouge_l(&tokenize("the cat sat"), &[tokenize("the dog sat")]), 2.0 / 3.0, 1e-9),
    ));
    out.push(("cider_self", close(cider(&[(cand.clone(), vec![cand])])?, 10.0, 1e-9)));

    let uniform = vec![vec![0.0; 5]; 2];
    out.push((
        "ce_uniform",
        close(cross_entropy_tokens(&uniform, &[1, 3], -100)?, 5f64.ln(), 1e-12),
    ));
    out.push((
        "bce_zero_logits",
        close(bce_mask(&MaskLogits::filled(4, 4, 0.0)?, &left)?, 2f64.ln(), 1e-12),
    ));
    out.push((
        "dice_half",
        close(dice_loss(&MaskLogits::filled(4, 4, 0.0)?, &left, 0.0)?, 0.5, 1e-12),
    ));
    out.push((
        "dice_bounded",
        (0.0..=1.0).contains(&dice_loss(&MaskLogits::filled(4, 4, 3.0)?, &top, DEFAULT_DICE_EPS)?),
    ));
    out.push(("total_loss_weights", close(total_loss(1.0, 0.5, 0.2, &LossWeights::default()), 2.1, 1e-15)));
    Ok(out)
}

pub fn selftest(ctx: &Context) -> Result<Outcome> {
    let results = checks()?;
    let failed: Vec<&str> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let checks: Vec<_> = results.iter().map(|(n, ok)| json!({ "name": n, "pass": ok })).collect();
    let config = FileConfig {
        seed: Some(ctx.seed),
        ..Default::default()
    };
    let mut out = Outcome::ok(
        json!({ "passed": failed.is_empty(), "checks": checks, "failed": failed }),
        config,
        vec![],
    );
    out.failed = !failed.is_empty();
    Ok(out)
}
