//! Instruction-dataset assembly: ingest per-object mask annotations, author
//! one prompt per object, write JSONL records, and validate or summarize an
//! existing dataset.
//!
//! Annotation layout: `<root>/<video>/<object>/<frame>.png`.
//! QA layout: `<qa>/<video>/<object>/qa.json`, a JSON array of
//! `{"question": ..., "answer": ...}`.
//! Paths inside records are relative to the JSONL file's directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Component, Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{list_numbered_pngs, read_layer, read_mask, write_layer};
use crate::raster::BinaryMask;
use crate::synth::{random_prompt_kind, synthesize_prompt, PromptKind, PromptStyle};
use crate::text_metrics::word_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnotationLayout {
    #[default]
    PngMasks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidConfig(format!("unknown split {other:?}, expected train or test"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaPair {
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstructRecord {
    pub sample_id: String,
    pub video_dir: String,
    pub num_frames: usize,
    pub object_id: String,
    pub prompt_frame: usize,
    pub prompt_kind: PromptKind,
    pub prompt_layer: String,
    pub qa: Vec<QaPair>,
    pub split: Split,
}

/// Something that was skipped or flagged without aborting the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub message: String,
}

/// One annotated object: its mask files in frame order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectGroup {
    pub video: String,
    pub object: String,
    pub dir: PathBuf,
    pub frames: Vec<PathBuf>,
}

impl ObjectGroup {
    pub fn sample_id(&self) -> String {
        format!("{}__{}", self.video, self.object)
    }

    pub fn load_masks(&self) -> Result<Vec<BinaryMask>> {
        self.frames.iter().map(|p| read_mask(p)).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub groups: Vec<ObjectGroup>,
    /// Objects excluded because their frame set is incomplete.
    pub flagged: Vec<Diagnostic>,
    pub diagnostics: Vec<Diagnostic>,
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Groups mask files by (video, object). An object whose frame numbers have
/// a gap, or whose frame count differs from the longest sibling in the same
/// video, is flagged and left out. Non-numeric file names are skipped.
pub fn ingest_annotations(root: &Path, layout: AnnotationLayout) -> Result<Ingested> {
    let AnnotationLayout::PngMasks = layout;
    let mut out = Ingested::default();
    for video_dir in sorted_subdirs(root)? {
        let video = file_name(&video_dir);
        let mut objects = Vec::new();
        for object_dir in sorted_subdirs(&video_dir)? {
            let (numbered, skipped) = match list_numbered_pngs(&object_dir) {
                Ok(v) => v,
                Err(e) => {
                    out.diagnostics.push(Diagnostic {
                        path: object_dir.clone(),
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            for p in skipped {
                out.diagnostics.push(Diagnostic {
                    path: p,
                    message: "file name is not a frame number; skipped".into(),
                });
            }
            if numbered.is_empty() {
                continue;
            }
            objects.push((object_dir, numbered));
        }
        let longest = objects.iter().map(|(_, f)| f.len()).max().unwrap_or(0);
        for (object_dir, numbered) in objects {
            let first = numbered[0].0;
            let contiguous = numbered.iter().enumerate().all(|(i, (n, _))| *n == first + i as u64);
            if !contiguous || numbered.len() != longest {
                out.flagged.push(Diagnostic {
                    path: object_dir,
                    message: format!(
                        "incomplete frame set: {} frames, expected {} contiguous",
                        numbered.len(),
                        longest
                    ),
                });
                continue;
            }
            out.groups.push(ObjectGroup {
                video: video.clone(),
                object: file_name(&object_dir),
                dir: object_dir,
                frames: numbered.into_iter().map(|(_, p)| p).collect(),
            });
        }
    }
    if out.groups.is_empty() && out.flagged.is_empty() {
        return Err(Error::EmptyDataset(root.to_path_buf()));
    }
    Ok(out)
}

/// Per-record seed: the first 8 bytes of SHA-256 over the run seed and the
/// sample id, so records are independent of processing order.
pub fn record_seed(seed: u64, sample_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(sample_id.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

/// `to` expressed relative to the directory `from`, both taken as absolute.
pub fn relative_path(from: &Path, to: &Path) -> PathBuf {
    let from: Vec<Component> = from.components().collect();
    let to_c: Vec<Component> = to.components().collect();
    let common = from.iter().zip(&to_c).take_while(|(a, b)| a == b).count();
    let mut out = PathBuf::new();
    for _ in common..from.len() {
        out.push("..");
    }
    for c in &to_c[common..] {
        out.push(c.as_os_str());
    }
    if out.as_os_str().is_empty() {
        out.push(".");
    }
    out
}

fn absolute(p: &Path) -> Result<PathBuf> {
    fs::canonicalize(p).map_err(|e| Error::io(p, e))
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().replace('\\', "/")
}

/// Maximum kind redraws when a drawn kind does not fit a tiny mask.
const KIND_ATTEMPTS: usize = 16;

/// Builds one record and writes its prompt layer to
/// `<out_dir>/prompts/<sample_id>.png`.
///
/// The prompt frame is drawn uniformly among frames where the object is
/// visible; the kind is drawn uniformly from the eight kinds, redrawn if the
/// mask is too small for it.
pub fn build_instruct_record(
    group: &ObjectGroup,
    masks: &[BinaryMask],
    qa: Vec<QaPair>,
    split: Split,
    seed: u64,
    out_dir: &Path,
) -> Result<InstructRecord> {
    let sample_id = group.sample_id();
    if qa.is_empty() {
        return Err(Error::Contract {
            context: "build_instruct_record",
            message: format!("{sample_id}: no QA pairs"),
        });
    }
    let visible: Vec<usize> = (0..masks.len()).filter(|&i| !masks[i].is_empty()).collect();
    if visible.is_empty() {
        return Err(Error::EmptyObject(sample_id));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, &sample_id));
    let frame = visible[rng.gen_range(0..visible.len())];
    let mask = &masks[frame];
    let style = PromptStyle::for_dims(mask.width(), mask.height());

    let mut drawn = None;
    for _ in 0..KIND_ATTEMPTS {
        let kind = random_prompt_kind(rng.next_u64());
        match synthesize_prompt(mask, kind, &style, rng.next_u64()) {
            Ok(layer) => {
                drawn = Some((kind, layer));
                break;
            }
            Err(Error::DegenerateMask { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let (kind, layer) = match drawn {
        Some(d) => d,
        // Mask always succeeds on a non-empty mask.
        None => (PromptKind::Mask, synthesize_prompt(mask, PromptKind::Mask, &style, 0)?),
    };

    let rel_layer = PathBuf::from("prompts").join(format!("{sample_id}.png"));
    write_layer(&out_dir.join(&rel_layer), &layer.with_anchor_frame(frame))?;
    let out_abs = absolute(out_dir)?;
    let video_abs = absolute(group.dir.parent().unwrap_or(&group.dir))?;
    Ok(InstructRecord {
        sample_id,
        video_dir: path_string(&relative_path(&out_abs, &video_abs)),
        num_frames: masks.len(),
        object_id: group.object.clone(),
        prompt_frame: frame,
        prompt_kind: kind,
        prompt_layer: path_string(&rel_layer),
        qa,
        split,
    })
}

pub fn read_qa(path: &Path) -> Result<Vec<QaPair>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BuildSummary {
    pub records: usize,
    pub skipped: Vec<Diagnostic>,
}

/// Full pipeline: ingest, pair with QA sidecars, build records in parallel,
/// and write them to `out_jsonl` sorted by sample id. Objects without QA or
/// without any visible frame are skipped with a diagnostic.
pub fn build_dataset(root: &Path, qa_root: &Path, split: Split, seed: u64, out_jsonl: &Path) -> Result<BuildSummary> {
    let ingested = ingest_annotations(root, AnnotationLayout::PngMasks)?;
    let out_dir = out_jsonl.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let results: Vec<std::result::Result<InstructRecord, Diagnostic>> = ingested
        .groups
        .par_iter()
        .map(|g| {
            let skip = |message: String| Diagnostic {
                path: g.dir.clone(),
                message,
            };
            let qa_path = qa_root.join(&g.video).join(&g.object).join("qa.json");
            let qa = read_qa(&qa_path).map_err(|e| skip(format!("no usable QA: {e}")))?;
            if qa.is_empty() {
                return Err(skip("QA list is empty".into()));
            }
            let masks = g.load_masks().map_err(|e| skip(e.to_string()))?;
            build_instruct_record(g, &masks, qa, split, seed, out_dir).map_err(|e| skip(e.to_string()))
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = ingested.diagnostics;
    skipped.extend(ingested.flagged);
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(d) => skipped.push(d),
        }
    }
    records.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    let mut text = String::new();
    for r in &records {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    fs::write(out_jsonl, text).map_err(|e| Error::io(out_jsonl, e))?;
    Ok(BuildSummary {
        records: records.len(),
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// 1-based line number; 0 for file-level problems.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub videos: usize,
    pub objects: usize,
    pub qa_pairs: usize,
    pub question_word_histogram: BTreeMap<usize, usize>,
    pub answer_word_histogram: BTreeMap<usize, usize>,
    pub frames_histogram: BTreeMap<usize, usize>,
    pub objects_per_video_histogram: BTreeMap<usize, usize>,
    pub prompt_kind_histogram: BTreeMap<String, usize>,
    pub mean_question_words: Option<f64>,
    pub mean_answer_words: Option<f64>,
}

fn check_record(rec: &InstructRecord, base: &Path, check_files: bool) -> Vec<String> {
    let mut v = Vec::new();
    if rec.num_frames == 0 {
        v.push("num_frames must be at least 1".into());
    }
    if rec.prompt_frame >= rec.num_frames {
        v.push(format!("prompt_frame {} outside 0..{}", rec.prompt_frame, rec.num_frames));
    }
    if rec.qa.is_empty() {
        v.push("qa is empty".into());
    }
    if rec.qa.iter().any(|q| q.question.trim().is_empty() || q.answer.trim().is_empty()) {
        v.push("qa contains an empty question or answer".into());
    }
    if rec.sample_id.is_empty() || rec.object_id.is_empty() {
        v.push("sample_id and object_id must be non-empty".into());
    }
    if check_files {
        if !base.join(&rec.video_dir).is_dir() {
            v.push(format!("video_dir {} does not exist", rec.video_dir));
        }
        let layer = base.join(&rec.prompt_layer);
        match read_layer(&layer) {
            Ok(l) if l.is_empty() => v.push(format!("prompt_layer {} has no marked pixel", rec.prompt_layer)),
            Ok(_) => {}
            Err(e) => v.push(format!("prompt_layer unreadable: {e}")),
        }
    }
    v
}

fn mean(hist: &BTreeMap<usize, usize>) -> Option<f64> {
    let n: usize = hist.values().sum();
    (n > 0).then(|| hist.iter().map(|(k, c)| (k * c) as f64).sum::<f64>() / n as f64)
}

fn scan(path: &Path, check_files: bool) -> Result<(DatasetReport, Vec<Violation>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut report = DatasetReport::default();
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    let mut per_video: BTreeMap<String, usize> = BTreeMap::new();
    let mut records = 0usize;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: InstructRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                violations.push(Violation {
                    line: line_no,
                    message: format!("malformed record: {e}"),
                });
                continue;
            }
        };
        records += 1;
        for message in check_record(&rec, base, check_files) {
            violations.push(Violation { line: line_no, message });
        }
        if !seen.insert((rec.video_dir.clone(), rec.object_id.clone())) {
            violations.push(Violation {
                line: line_no,
                message: format!("object {} of {} is prompted more than once", rec.object_id, rec.video_dir),
            });
        }
        *per_video.entry(rec.video_dir.clone()).or_default() += 1;
        report.objects += 1;
        report.qa_pairs += rec.qa.len();
        *report.frames_histogram.entry(rec.num_frames).or_default() += 1;
        *report.prompt_kind_histogram.entry(rec.prompt_kind.name().to_string()).or_default() += 1;
        for q in &rec.qa {
            *report.question_word_histogram.entry(word_count(&q.question)).or_default() += 1;
            *report.answer_word_histogram.entry(word_count(&q.answer)).or_default() += 1;
        }
    }
    if records == 0 && violations.is_empty() {
        violations.push(Violation {
            line: 0,
            message: "empty dataset".into(),
        });
    }
    report.videos = per_video.len();
    for &n in per_video.values() {
        *report.objects_per_video_histogram.entry(n).or_default() += 1;
    }
    report.mean_question_words = mean(&report.question_word_histogram);
    report.mean_answer_words = mean(&report.answer_word_histogram);
    Ok((report, violations))
}

/// Checks every record invariant and file reference and computes the
/// report. Problems are returned as violations, not errors.
pub fn validate_dataset(path: &Path) -> Result<(DatasetReport, Vec<Violation>)> {
    scan(path, true)
}

/// Counts and histograms only; referenced files are not opened.
pub fn summarize_stats(path: &Path) -> Result<DatasetReport> {
    scan(path, false).map(|(r, _)| r)
}

/// `n` frame indices `floor((k + 0.5) * total / n)`, clamped to the last
/// frame. Indices repeat when `total < n`.
pub fn sample_frames(total: usize, n: usize) -> Vec<usize> {
    if total == 0 {
        return Vec::new();
    }
    (0..n).map(|k| ((2 * k + 1) * total / (2 * n)).min(total - 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_mask;

    fn square(w: u32, x0: u32, side: u32) -> BinaryMask {
        BinaryMask::from_fn(w, w, |x, y| x >= x0 && x < x0 + side && y >= 4 && y < 4 + side)
    }

    fn qa() -> Vec<QaPair> {
        vec![QaPair {
            question: "What is the marked object doing?".into(),
            answer: "It is rolling to the left.".into(),
        }]
    }

    /// `videos` x `objects`, `frames` frames each, visible everywhere.
    fn fixture(root: &Path, videos: usize, objects: usize, frames: usize) {
        for v in 0..videos {
            for o in 0..objects {
                for f in 0..frames {
                    let m = square(24, 2 + f as u32, 8);
                    write_mask(&root.join(format!("v{v}/obj{o}/{f:05}.png")), &m).unwrap();
                }
            }
        }
    }

    #[test]
    fn ingest_groups_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fixture(root, 2, 2, 3);
        let ing = ingest_annotations(root, AnnotationLayout::PngMasks).unwrap();
        assert_eq!(ing.groups.len(), 4);
        assert_eq!(ing.groups[0].sample_id(), "v0__obj0");

        fs::remove_file(root.join("v1/obj1/00001.png")).unwrap();
        fs::write(root.join("v0/obj0/notes.png"), b"x").unwrap();
        let ing = ingest_annotations(root, AnnotationLayout::PngMasks).unwrap();
        assert_eq!(ing.groups.len(), 3);
        assert_eq!(ing.flagged.len(), 1);
        assert!(ing.flagged[0].path.ends_with("v1/obj1"));
        assert_eq!(ing.diagnostics.len(), 1);

        // a trailing frame missing is caught by the sibling count
        fs::remove_file(root.join("v0/obj1/00002.png")).unwrap();
        let ing = ingest_annotations(root, AnnotationLayout::PngMasks).unwrap();
        assert_eq!(ing.flagged.len(), 2);

        let empty = tempfile::tempdir().unwrap();
        assert!(matches!(
            ingest_annotations(empty.path(), AnnotationLayout::PngMasks),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn record_prompts_only_visible_frame() {
        let dir = tempfile::tempdir().unwrap();
        let group = ObjectGroup {
            video: "v".into(),
            object: "o".into(),
            dir: dir.path().to_path_buf(),
            frames: vec![],
        };
        let mut masks = vec![BinaryMask::empty(24, 24); 5];
        masks[3] = square(24, 5, 8);
        for seed in 0..20 {
            let rec = build_instruct_record(&group, &masks, qa(), Split::Test, seed, dir.path()).unwrap();
            assert_eq!(rec.prompt_frame, 3);
        }
        let blank = vec![BinaryMask::empty(24, 24); 2];
        assert!(matches!(
            build_instruct_record(&group, &blank, qa(), Split::Test, 0, dir.path()),
            Err(Error::EmptyObject(_))
        ));
        assert!(build_instruct_record(&group, &masks, vec![], Split::Test, 0, dir.path()).is_err());
    }

    #[test]
    fn prompt_frame_is_uniform() {
        // 1000 builds over 10 visible frames: each count is Binomial(1000, 0.1).
        // 99.9% two-sided bounds for one bin, widened by a Bonferroni factor
        // of 10 bins: mean 100, sd 9.49, z = 3.89 -> [63, 137].
        let dir = tempfile::tempdir().unwrap();
        let masks = vec![square(12, 2, 6); 10];
        let mut hist = [0usize; 10];
        for seed in 0..1000u64 {
            let group = ObjectGroup {
                video: "v".into(),
                object: "o".into(),
                dir: dir.path().to_path_buf(),
                frames: vec![],
            };
            let rec = build_instruct_record(&group, &masks, qa(), Split::Train, seed, dir.path()).unwrap();
            hist[rec.prompt_frame] += 1;
        }
        for c in hist {
            assert!((63..=137).contains(&c), "{hist:?}");
        }
    }

    #[test]
    fn build_validate_round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("ann");
        let qa_root = dir.path().join("qa");
        fixture(&root, 2, 2, 4);
        for v in 0..2 {
            for o in 0..2 {
                let p = qa_root.join(format!("v{v}/obj{o}/qa.json"));
                fs::create_dir_all(p.parent().unwrap()).unwrap();
                fs::write(&p, serde_json::to_string(&qa()).unwrap()).unwrap();
            }
        }
        fs::remove_file(qa_root.join("v1/obj1/qa.json")).unwrap();

        let a = dir.path().join("a/data.jsonl");
        let b = dir.path().join("b/data.jsonl");
        let sa = build_dataset(&root, &qa_root, Split::Train, 0, &a).unwrap();
        build_dataset(&root, &qa_root, Split::Train, 0, &b).unwrap();
        assert_eq!(sa.records, 3);
        assert_eq!(sa.skipped.len(), 1);
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        for id in ["v0__obj0", "v0__obj1", "v1__obj0"] {
            let rel = format!("prompts/{id}.png");
            assert_eq!(
                fs::read(dir.path().join("a").join(&rel)).unwrap(),
                fs::read(dir.path().join("b").join(&rel)).unwrap()
            );
        }

        let (report, violations) = validate_dataset(&a).unwrap();
        assert!(violations.is_empty(), "{violations:?}");
        assert_eq!((report.videos, report.objects, report.qa_pairs), (2, 3, 3));
        assert_eq!(report.objects_per_video_histogram, BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(report.mean_question_words, Some(6.0));
        assert_eq!(summarize_stats(&a).unwrap(), report);
    }

    #[test]
    fn validator_flags_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.jsonl");
        fs::write(&p, "").unwrap();
        let (r, v) = validate_dataset(&p).unwrap();
        assert_eq!((r.videos, r.objects, r.qa_pairs), (0, 0, 0));
        assert_eq!(v.len(), 1);

        let rec = InstructRecord {
            sample_id: "v__o".into(),
            video_dir: ".".into(),
            num_frames: 3,
            object_id: "o".into(),
            prompt_frame: 5,
            prompt_kind: PromptKind::Arrow,
            prompt_layer: "missing.png".into(),
            qa: qa(),
            split: Split::Test,
        };
        let line = serde_json::to_string(&rec).unwrap();
        let multi = line.replace("\"prompt_frame\":5", "\"prompt_frame\":[1,2]");
        let extra = line.replace("\"split\"", "\"extra\":1,\"split\"");
        fs::write(&p, format!("{line}\n{line}\n{multi}\nnot json\n{extra}\n")).unwrap();
        let (r, v) = validate_dataset(&p).unwrap();
        assert_eq!(r.objects, 2);
        let lines: Vec<usize> = v.iter().map(|v| v.line).collect();
        // line 1: frame range + missing layer; line 2: same + duplicate
        assert_eq!(lines, vec![1, 1, 2, 2, 2, 3, 4, 5]);
    }

    #[test]
    fn stats_means() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.jsonl");
        let mk = |id: &str, q: &str| InstructRecord {
            sample_id: id.into(),
            video_dir: id.into(),
            num_frames: 2,
            object_id: "o".into(),
            prompt_frame: 0,
            prompt_kind: PromptKind::Point,
            prompt_layer: "x.png".into(),
            qa: vec![QaPair {
                question: q.into(),
                answer: "yes".into(),
            }],
            split: Split::Train,
        };
        let text = [mk("a", "one two three four"), mk("b", "one two three four five six?")]
            .iter()
            .map(|r| serde_json::to_string(r).unwrap() + "\n")
            .collect::<String>();
        fs::write(&p, text).unwrap();
        assert_eq!(summarize_stats(&p).unwrap().mean_question_words, Some(5.0));
    }

    #[test]
    fn frame_sampling() {
        assert_eq!(sample_frames(16, 16), (0..16).collect::<Vec<_>>());
        assert_eq!(sample_frames(32, 16), (0..16).map(|k| 2 * k + 1).collect::<Vec<_>>());
        assert_eq!(sample_frames(8, 16), (0..16).map(|k| k / 2).collect::<Vec<_>>());
        assert_eq!(sample_frames(1, 3), vec![0, 0, 0]);
    }

    #[test]
    fn relative_paths() {
        assert_eq!(relative_path(Path::new("/a/b/out"), Path::new("/a/b/ann/v0")), PathBuf::from("../ann/v0"));
        assert_eq!(relative_path(Path::new("/a"), Path::new("/a")), PathBuf::from("."));
        assert_eq!(relative_path(Path::new("/a"), Path::new("/a/x")), PathBuf::from("x"));
    }
}
