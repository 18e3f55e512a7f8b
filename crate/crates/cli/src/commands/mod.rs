pub mod bench;
pub mod dataset;
pub mod eval;
pub mod media;
pub mod selftest;

use std::path::PathBuf;

use serde_json::Value;

use crate::config::FileConfig;

pub struct Context {
    pub seed: u64,
    pub file: FileConfig,
}

pub struct Outcome {
    pub result: Value,
    /// Resolved settings, in the shape of a config file.
    pub config: Value,
    pub inputs: Vec<PathBuf>,
    /// Exit with status 1 even though a result was produced.
    pub failed: bool,
}

impl Outcome {
    pub fn ok(result: Value, config: FileConfig, inputs: Vec<PathBuf>) -> Self {
        Self {
            result,
            config: serde_json::to_value(config).expect("config serializes"),
            inputs,
            failed: false,
        }
    }
}
