use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use vprompt_core::io::{read_layer, read_layer_dir, write_clip_dir, write_mask};
use vprompt_core::synthetic::{textured_square_clip, SquareClipSpec};
use vprompt_core::BinaryMask;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vprompt")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad stdout ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes a 16-frame textured-square clip and its masks.
fn clip_fixture(dir: &Path) {
    let spec = SquareClipSpec {
        frames: 16,
        ..Default::default()
    };
    let s = textured_square_clip(&spec, 3).unwrap();
    write_clip_dir(&dir.join("frames"), s.clip.frames()).unwrap();
    for (i, m) in s.masks.iter().enumerate() {
        write_mask(&dir.join("masks").join(format!("{i:05}.png")), m).unwrap();
    }
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["manifest"]["subcommand"], "selftest");
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(run(&["synth"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn synth_is_seeded_and_recorded_in_manifest() {
    let tmp = TempDir::new().unwrap();
    let mask = tmp.path().join("m.png");
    write_mask(&mask, &BinaryMask::from_fn(40, 30, |x, y| (8..30).contains(&x) && (6..22).contains(&y))).unwrap();
    let (a, b) = (tmp.path().join("a.png"), tmp.path().join("b.png"));
    for out in [&a, &b] {
        let o = run(&["--seed", "9", "synth", "--mask", p(&mask), "--kind", "scribble", "--out", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v = stdout_json(&o);
        assert_eq!(v["result"]["kind"], "scribble");
        assert_eq!(v["result"]["valid"], true);
        assert_eq!(v["manifest"]["config"]["seed"], 9);
        let digest = v["manifest"]["input_digests"][p(&mask)].as_str().unwrap();
        assert_eq!(digest.len(), 64);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let o = run(&["synth", "--mask", p(&mask), "--kind", "lasso", "--out", p(&a)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"]["code"], "invalid_config");
}

#[test]
fn propagate_then_overlay() {
    let tmp = TempDir::new().unwrap();
    clip_fixture(tmp.path());
    let prompt = tmp.path().join("prompt.png");
    let o = run(&["synth", "--mask", p(&tmp.path().join("masks/00004.png")), "--kind", "point", "--out", p(&prompt)]);
    assert!(o.status.success());

    let layers = tmp.path().join("layers");
    let overlay = tmp.path().join("overlay");
    let tracks = tmp.path().join("tracks.json");
    let o = run(&[
        "propagate", "--frames", p(&tmp.path().join("frames")), "--prompt", p(&prompt), "--anchor", "4",
        "--out-layers", p(&layers), "--out-overlay", p(&overlay), "--tracks", p(&tracks), "--no-manifest",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["result"]["frames"], 16);
    assert_eq!(v["result"]["lost_frames"].as_array().unwrap().len(), 0);
    assert!(v.get("manifest").is_none());

    let out_layers = read_layer_dir(&layers).unwrap();
    assert_eq!(out_layers.len(), 16);
    assert!(out_layers.iter().all(|l| !l.is_empty()));
    assert_eq!(out_layers[4].pixels(), read_layer(&prompt).unwrap().pixels());
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(layers.join("propagation.json")).unwrap()).unwrap();
    assert_eq!(sidecar["frames"].as_array().unwrap().len(), 16);
    assert!(fs::read_to_string(&tracks).unwrap().contains("\"anchor\""));
    assert_eq!(fs::read_dir(&overlay).unwrap().count(), 16);

    let again = tmp.path().join("overlay2");
    let o = run(&["overlay", "--frames", p(&tmp.path().join("frames")), "--layers", p(&layers), "--out", p(&again)]);
    assert!(o.status.success());
    for i in 0..16 {
        let name = format!("{i:05}.png");
        assert_eq!(fs::read(overlay.join(&name)).unwrap(), fs::read(again.join(&name)).unwrap());
    }
}

#[test]
fn propagate_modes() {
    let tmp = TempDir::new().unwrap();
    clip_fixture(tmp.path());
    let prompt = tmp.path().join("prompt.png");
    run(&["synth", "--mask", p(&tmp.path().join("masks/00000.png")), "--kind", "rectangle", "--out", p(&prompt)]);
    let frames = tmp.path().join("frames");
    let layers = tmp.path().join("none");
    let o = run(&["propagate", "--frames", p(&frames), "--prompt", p(&prompt), "--anchor", "0", "--mode", "none", "--out-layers", p(&layers)]);
    assert!(o.status.success());
    let out = read_layer_dir(&layers).unwrap();
    assert!(!out[0].is_empty());
    assert!(out[1..].iter().all(|l| l.is_empty()));

    let oracle = tmp.path().join("oracle");
    let o = run(&["propagate", "--frames", p(&frames), "--prompt", p(&prompt), "--anchor", "0", "--mode", "oracle", "--out-layers", p(&oracle)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"]["code"], "contract_violation");

    let o = run(&[
        "propagate", "--frames", p(&frames), "--prompt", p(&prompt), "--anchor", "0", "--mode", "oracle",
        "--kind", "rectangle", "--oracle-masks", p(&tmp.path().join("masks")), "--out-layers", p(&oracle),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read_layer_dir(&oracle).unwrap().iter().all(|l| !l.is_empty()));
}

#[test]
fn eval_seg_reports_j_f_and_r() {
    let tmp = TempDir::new().unwrap();
    let square = BinaryMask::from_fn(32, 32, |x, y| (4..20).contains(&x) && (4..20).contains(&y));
    let empty = BinaryMask::empty(32, 32);
    for root in ["gt", "pred"] {
        for f in 0..3 {
            write_mask(&tmp.path().join(root).join("pos").join(format!("{f:05}.png")), &square).unwrap();
            write_mask(&tmp.path().join(root).join("neg").join(format!("{f:05}.png")), &empty).unwrap();
        }
    }
    let o = run(&["eval-seg", "--pred", p(&tmp.path().join("pred")), "--gt", p(&tmp.path().join("gt"))]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o)["result"].clone();
    assert_eq!(v["J"], 1.0);
    assert_eq!(v["F"], 1.0);
    assert_eq!(v["JF"], 1.0);
    assert_eq!(v["R"], 1.0);
    assert_eq!(v["negatives"], 1);
    assert_eq!(v["tolerance"], 1);

    fs::remove_dir_all(tmp.path().join("pred/neg")).unwrap();
    let o = run(&["eval-seg", "--pred", p(&tmp.path().join("pred")), "--gt", p(&tmp.path().join("gt"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_text_scores_and_contract() {
    let tmp = TempDir::new().unwrap();
    let pred = tmp.path().join("pred.jsonl");
    let refs = tmp.path().join("refs.jsonl");
    fs::write(&pred, "{\"id\":\"a\",\"text\":\"the cat sat on the mat\"}\n{\"id\":\"b\",\"text\":\"a brown dog runs home\"}\n").unwrap();
    fs::write(
        &refs,
        "{\"id\":\"a\",\"references\":[\"the cat sat on the mat\"]}\n{\"id\":\"b\",\"text\":\"a brown dog runs home\"}\n",
    )
    .unwrap();
    let o = run(&["eval-text", "--pred", p(&pred), "--ref", p(&refs)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o)["result"].clone();
    assert_eq!(v["n"], 2);
    assert!((v["rougeL"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["cider"].as_f64().unwrap() - 10.0).abs() < 1e-9);

    fs::write(&refs, "{\"id\":\"a\",\"references\":[\"x\"]}\n").unwrap();
    let o = run(&["eval-text", "--pred", p(&pred), "--ref", p(&refs)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_json(&o)["error"]["message"].as_str().unwrap().contains("no references for id b"));
}

#[test]
fn validate_flags_bad_records() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.jsonl");
    fs::write(&path, "{\"sample_id\": 3}\nnot json\n").unwrap();
    let o = run(&["validate", "--in", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["result"]["valid"], false);
    let lines: Vec<u64> = v["result"]["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["line"].as_u64().unwrap())
        .collect();
    assert!(lines.contains(&1) && lines.contains(&2));
}

#[test]
fn config_file_supplies_seed_and_manifest_config_replays() {
    let tmp = TempDir::new().unwrap();
    let mask = tmp.path().join("m.png");
    write_mask(&mask, &BinaryMask::from_fn(40, 40, |x, y| (5..35).contains(&x) && (5..35).contains(&y))).unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 21\n\n[style]\ncolor = [0, 255, 0]\nstroke_width = 3\n").unwrap();
    let out = tmp.path().join("a.png");
    let o = run(&["--config", p(&cfg), "synth", "--mask", p(&mask), "--kind", "arrow", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let config = &v["manifest"]["config"];
    assert_eq!(config["seed"], 21);
    assert_eq!(config["style"]["stroke_width"], 3);
    assert_eq!(read_layer(&out).unwrap().pixels().chunks(4).find(|px| px[3] > 0).unwrap()[..3], [0, 255, 0]);

    let replay = tmp.path().join("replay.json");
    fs::write(&replay, config.to_string()).unwrap();
    let out2 = tmp.path().join("b.png");
    let o = run(&["--config", p(&replay), "synth", "--mask", p(&mask), "--kind", "arrow", "--out", p(&out2)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&out).unwrap(), fs::read(&out2).unwrap());

    fs::write(&cfg, "sede = 1\n").unwrap();
    let o = run(&["--config", p(&cfg), "selftest"]);
    assert_eq!(o.status.code(), Some(1));
}
