use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use vprompt_core::io::{list_numbered_pngs, read_mask_dir};
use vprompt_core::seg_metrics::{default_tolerance, RobustnessSample};
use vprompt_core::text_metrics::score_corpus;
use vprompt_core::{evaluate_dataset, robustness_r, BinaryMask, Error, Result};

use super::{Context, Outcome};
use crate::config::FileConfig;

const R_DEFINITION: &str =
    "mean over sequences with all-empty ground truth of (1 - predicted foreground pixel fraction); \
     this tool's operational definition";
const CIDER_VARIANT: &str =
    "tf-idf over n=1..4, df from the evaluated references, idf = ln((1+N)/(1+df)) + 1, no length penalty";

#[derive(Args, Debug)]
pub struct EvalSegArgs {
    /// Predicted masks, `<seq>/<frame>.png`.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth masks in the same layout.
    #[arg(long)]
    pub gt: PathBuf,
    /// Boundary tolerance in pixels; default scales with the image diagonal.
    #[arg(long)]
    pub tolerance: Option<u32>,
}

/// Sequence directories under `root`, or `root` itself as sequence `.` when
/// it directly holds frames.
fn sequences(root: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() {
            names.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    names.sort();
    if names.is_empty() && !list_numbered_pngs(root)?.0.is_empty() {
        names.push(".".into());
    }
    Ok(names)
}

pub fn eval_seg(ctx: &Context, a: &EvalSegArgs) -> Result<Outcome> {
    let tolerance = a.tolerance.or(ctx.file.tolerance);
    let mut seqs: BTreeMap<String, (Vec<BinaryMask>, Vec<BinaryMask>)> = BTreeMap::new();
    for name in sequences(&a.gt)? {
        let gt = read_mask_dir(&a.gt.join(&name))?;
        let pred_dir = a.pred.join(&name);
        if !pred_dir.is_dir() {
            return Err(Error::Contract {
                context: "eval-seg",
                message: format!("no predictions for sequence {name}"),
            });
        }
        let pred = read_mask_dir(&pred_dir)?;
        seqs.insert(name, (pred, gt));
    }
    let result = evaluate_dataset(&seqs, tolerance)?;
    let negatives: Vec<RobustnessSample> = seqs
        .values()
        .filter(|(_, gt)| gt.iter().all(BinaryMask::is_empty))
        .map(|(pred, gt)| RobustnessSample {
            pred: pred.clone(),
            gt: gt.clone(),
            target_exists: false,
        })
        .collect();
    let r = if negatives.is_empty() { None } else { Some(robustness_r(&negatives)?) };
    let resolved_tol = tolerance.unwrap_or_else(|| {
        let (w, h) = seqs.values().next().and_then(|(_, g)| g.first()).map_or((1, 1), BinaryMask::dims);
        default_tolerance(w, h)
    });
    let per_sequence: Map<String, Value> = result
        .per_sequence
        .iter()
        .map(|(k, s)| (k.clone(), json!({ "J": s.j, "F": s.f })))
        .collect();
    let config = FileConfig {
        seed: Some(ctx.seed),
        tolerance: Some(resolved_tol),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({
            "J": result.j,
            "F": result.f,
            "JF": result.jf,
            "R": r,
            "R_definition": R_DEFINITION,
            "negatives": negatives.len(),
            "tolerance": resolved_tol,
            "per_sequence": per_sequence,
        }),
        config,
        vec![a.pred.clone(), a.gt.clone()],
    ))
}

#[derive(Args, Debug)]
pub struct EvalTextArgs {
    /// JSONL of `{"id", "text"}`.
    #[arg(long)]
    pub pred: PathBuf,
    /// JSONL of `{"id", "references": [...]}` or `{"id", "text"}`; lines
    /// sharing an id pool their references.
    #[arg(long = "ref")]
    pub refs: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PredLine {
    id: String,
    text: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefLine {
    id: String,
    #[serde(default)]
    references: Vec<String>,
    text: Option<String>,
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

pub fn eval_text(ctx: &Context, a: &EvalTextArgs) -> Result<Outcome> {
    let preds: Vec<PredLine> = read_jsonl(&a.pred)?;
    let mut refs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in read_jsonl::<RefLine>(&a.refs)? {
        let entry = refs.entry(r.id).or_default();
        entry.extend(r.references);
        entry.extend(r.text);
    }
    let mut by_id: BTreeMap<String, String> = BTreeMap::new();
    for p in preds {
        if by_id.insert(p.id.clone(), p.text).is_some() {
            return Err(Error::Contract {
                context: "eval-text",
                message: format!("duplicate prediction id {}", p.id),
            });
        }
    }
    let mut pairs = Vec::with_capacity(by_id.len());
    for (id, text) in by_id {
        match refs.get(&id) {
            Some(r) if !r.is_empty() => pairs.push((text, r.clone())),
            _ => {
                return Err(Error::Contract {
                    context: "eval-text",
                    message: format!("no references for id {id}"),
                })
            }
        }
    }
    let scores = score_corpus(&pairs)?;
    let config = FileConfig {
        seed: Some(ctx.seed),
        ..Default::default()
    };
    Ok(Outcome::ok(
        json!({
            "bleu4": scores.bleu4,
            "rougeL": scores.rouge_l,
            "cider": scores.cider,
            "n": scores.n,
            "cider_variant": CIDER_VARIANT,
        }),
        config,
        vec![a.pred.clone(), a.refs.clone()],
    ))
}
