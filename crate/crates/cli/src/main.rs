//! `vprompt`: prompt synthesis, propagation, overlay, evaluation and
//! dataset tooling. Structured output goes to stdout as JSON, diagnostics to
//! stderr. Exit codes: 0 success, 1 contract or I/O error, 2 usage error.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use vprompt_core::Error;

#[derive(Parser, Debug)]
#[command(name = "vprompt", version, about = "Visual prompt engine for object-centric video")]
struct Cli {
    /// Seed for every random draw (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML or JSON config file. Flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print only the result, without the run manifest.
    #[arg(long, global = true)]
    no_manifest: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a prompt of one kind from a mask.
    Synth(commands::media::SynthArgs),
    /// Carry a prompt from its anchor frame to the whole clip.
    Propagate(commands::media::PropagateArgs),
    /// Alpha-blend a directory of layers onto a directory of frames.
    Overlay(commands::media::OverlayArgs),
    /// Region similarity, contour accuracy and robustness over mask trees.
    EvalSeg(commands::eval::EvalSegArgs),
    /// BLEU-4, ROUGE-L and CIDEr for predicted answers.
    EvalText(commands::eval::EvalTextArgs),
    /// Build an instruction dataset from mask annotations and QA files.
    MakeDataset(commands::dataset::MakeDatasetArgs),
    /// Check a dataset file; exits 1 when violations are found.
    Validate(commands::dataset::InputArgs),
    /// Counts and histograms for a dataset file.
    Stats(commands::dataset::InputArgs),
    /// Run embedded golden checks.
    Selftest,
    /// Time the propagation and overlay stages.
    Bench(commands::bench::BenchArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Propagate(_) => "propagate",
            Command::Overlay(_) => "overlay",
            Command::EvalSeg(_) => "eval-seg",
            Command::EvalText(_) => "eval-text",
            Command::MakeDataset(_) => "make-dataset",
            Command::Validate(_) => "validate",
            Command::Stats(_) => "stats",
            Command::Selftest => "selftest",
            Command::Bench(_) => "bench",
        }
    }
}

fn run(cli: &Cli) -> Result<commands::Outcome, Error> {
    let file = match &cli.config {
        Some(p) => config::FileConfig::load(p)?,
        None => config::FileConfig::default(),
    };
    let ctx = commands::Context {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        file,
    };
    if let Some(jobs) = cli.jobs.or(ctx.file.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("cannot size worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Synth(a) => commands::media::synth(&ctx, a),
        Command::Propagate(a) => commands::media::propagate(&ctx, a),
        Command::Overlay(a) => commands::media::overlay(&ctx, a),
        Command::EvalSeg(a) => commands::eval::eval_seg(&ctx, a),
        Command::EvalText(a) => commands::eval::eval_text(&ctx, a),
        Command::MakeDataset(a) => commands::dataset::make_dataset(&ctx, a),
        Command::Validate(a) => commands::dataset::validate(&ctx, a),
        Command::Stats(a) => commands::dataset::stats(&ctx, a),
        Command::Selftest => commands::selftest::selftest(&ctx),
        Command::Bench(a) => commands::bench::bench(&ctx, a),
    }
}

fn error_json(e: &Error) -> Value {
    json!({
        "error": {
            "code": e.code(),
            "contract": e.contract(),
            "message": e.to_string(),
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(outcome) => {
            let mut out = json!({ "result": outcome.result });
            if !cli.no_manifest {
                let digests = manifest::digest_inputs(&outcome.inputs);
                out["manifest"] = json!({
                    "tool_version": env!("CARGO_PKG_VERSION"),
                    "subcommand": cli.command.name(),
                    "argv": std::env::args().collect::<Vec<_>>(),
                    "config": outcome.config,
                    "input_digests": digests,
                    "duration_ms": start.elapsed().as_secs_f64() * 1e3,
                });
            }
            println!("{}", serde_json::to_string_pretty(&out).expect("JSON values serialize"));
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(1)
        }
    }
}
