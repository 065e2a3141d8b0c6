use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file {path}")]
    MissingFile { path: PathBuf },
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },
    #[error("corrupt or unsupported png {path}: {msg}")]
    CorruptPng { path: PathBuf, msg: String },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json error at {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate scene id {0}")]
    DuplicateId(String),
    #[error("scene id {0} not listed in manifest")]
    UnknownId(String),

    #[error("mask is empty")]
    EmptyMask,
    #[error("distance transform domain is empty")]
    EmptyDomain,
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is not connected")]
    Disconnected,

    #[error("mask is empty after boundary erosion")]
    EmptyAfterErosion,
    #[error("scene has {0} objects, at least 2 required")]
    TooFewObjects(usize),
    #[error("background or foreground has no pixels")]
    EmptySide,
    #[error("background encloses no regions")]
    NoRegions,

    #[error("texture bank holds {have} textures, {need} required")]
    BankTooSmall { have: usize, need: usize },
    #[error("texture bank required but missing")]
    BankMissing,
    #[error("scene has no background pixels")]
    EmptyBackground,
    #[error("invalid ablation spec: {0}")]
    InvalidSpec(String),
    #[error("object {0} vanished during ablation")]
    ObjectVanished(u16),
    #[error("all {input} scenes were filtered out ({criteria})")]
    AllFiltered { input: usize, criteria: String },
    #[error("scene {id}: {source}")]
    Scene {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Whether the error comes from the caller's request rather than the data.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidConfig(_) | Error::InvalidSpec(_) | Error::BankMissing => true,
            Error::Scene { source, .. } => source.is_usage(),
            _ => false,
        }
    }

    pub(crate) fn in_scene(id: &str, source: Error) -> Self {
        Error::Scene {
            id: id.to_string(),
            source: Box::new(source),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
