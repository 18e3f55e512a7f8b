use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: dimension mismatch, expected {expected:?} got {found:?}")]
    DimensionMismatch {
        context: &'static str,
        expected: (u32, u32),
        found: (u32, u32),
    },
    #[error("{context}: length mismatch, expected {expected} got {found}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{context}: {message}")]
    Contract {
        context: &'static str,
        message: String,
    },
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("mask too small for {kind} prompt (needs a bounding box of at least 3x3)")]
    DegenerateMask { kind: &'static str },
    #[error("prompt layer has no visible mark")]
    EmptyMark,
    #[error("clip has no frames")]
    EmptyClip,
    #[error("no trackable points inside the frame")]
    NoPoints,
    #[error("sequence has no frames")]
    EmptySequence,
    #[error("robustness needs at least one sample without a target")]
    NoNegatives,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("every target position is ignored")]
    NoTargets,
    #[error("object `{0}` is never visible")]
    EmptyObject(String),
    #[error("no annotations found under {0}")]
    EmptyDataset(PathBuf),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable identifier, used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Contract { .. } => "contract_violation",
            Error::EmptyMask => "empty_mask",
            Error::DegenerateMask { .. } => "degenerate_mask",
            Error::EmptyMark => "empty_mark",
            Error::EmptyClip => "empty_clip",
            Error::NoPoints => "no_points",
            Error::EmptySequence => "empty_sequence",
            Error::NoNegatives => "no_negatives",
            Error::EmptyCorpus => "empty_corpus",
            Error::NoTargets => "no_targets",
            Error::EmptyObject(_) => "empty_object",
            Error::EmptyDataset(_) => "empty_dataset",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Io { .. } => "io",
            Error::Image { .. } => "image",
            Error::Json(_) => "json",
        }
    }

    /// The violated contract for contract-class errors, if any.
    pub fn contract(&self) -> Option<&'static str> {
        match self {
            Error::DimensionMismatch { context, .. }
            | Error::LengthMismatch { context, .. }
            | Error::Contract { context, .. } => Some(context),
            _ => None,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dims(context: &'static str, expected: (u32, u32), found: (u32, u32)) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
