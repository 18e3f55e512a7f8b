use std::path::Path;

use serde::{Deserialize, Serialize};

use vprompt_core::{Error, PromptStyle, PropagationConfig};

/// Optional settings file. Every key may be omitted; command-line flags
/// override whatever is set here. The `config` object of a run manifest is
/// itself a valid file, so a run can be replayed from its manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub style: Option<PromptStyle>,
    pub propagation: Option<PropagationConfig>,
    pub tolerance: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let toml_err = |e: toml::de::Error| Error::InvalidConfig(format!("{}: {e}", path.display()));
        match ext {
            "json" => Ok(serde_json::from_str(&text)?),
            "toml" => toml::from_str(&text).map_err(toml_err),
            _ => serde_json::from_str(&text).or_else(|_| toml::from_str(&text).map_err(toml_err)),
        }
    }
}
