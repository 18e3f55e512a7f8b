use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use vprompt_core::{build_dataset, summarize_stats, validate_dataset, Result, Split};

use super::{Context, Outcome};
use crate::config::FileConfig;

#[derive(Args, Debug)]
pub struct MakeDatasetArgs {
    /// Annotation root, `<video>/<object>/<frame>.png`.
    #[arg(long)]
    pub root: PathBuf,
    /// QA root, `<video>/<object>/qa.json`.
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(long, default_value = "train")]
    pub split: Split,
    /// Output JSONL; prompt layers go to `prompts/` beside it.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn make_dataset(ctx: &Context, a: &MakeDatasetArgs) -> Result<Outcome> {
    let summary = build_dataset(&a.root, &a.qa, a.split, ctx.seed, &a.out)?;
    let config = FileConfig {
        seed: Some(ctx.seed),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({
            "records": summary.records,
            "split": a.split,
            "out": a.out,
            "skipped": summary.skipped,
        }),
        config,
        vec![a.root.clone(), a.qa.clone()],
    ))
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Dataset JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
}

pub fn validate(ctx: &Context, a: &InputArgs) -> Result<Outcome> {
    let (report, violations) = validate_dataset(&a.input)?;
    let failed = !violations.is_empty();
    let config = FileConfig {
        seed: Some(ctx.seed),
        ..Default::default()
    };
    let mut out = Outcome::ok(
        json!({
            "valid": !failed,
            "report": report,
            "violations": violations,
        }),
        config,
        vec![a.input.clone()],
    );
    out.failed = failed;
    Ok(out)
}

pub fn stats(ctx: &Context, a: &InputArgs) -> Result<Outcome> {
    let report = summarize_stats(&a.input)?;
    let config = FileConfig {
        seed: Some(ctx.seed),
        ..Default::default()
    };
    Ok(Outcome::ok(json!(report), config, vec![a.input.clone()]))
}
