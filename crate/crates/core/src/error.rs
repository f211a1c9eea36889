use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::BBox;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("cannot take the union of an empty box list")]
    EmptyUnion,
    #[error("degenerate box {0:?}")]
    Degenerate(BBox),
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("annotation sidecar not provided for the {0} slot")]
    MissingSidecar(&'static str),
    #[error("no annotation entry for element #{element} at {bbox:?}")]
    MissingAnnotation { element: usize, bbox: BBox },
    #[error("{0}")]
    Backend(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VisualError {
    #[error("color extraction needs a non-empty crop")]
    EmptyCrop,
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rules file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown dark-pattern type `{0}`")]
    UnknownType(String),
    #[error("rule {dp_type}: missing pattern slot `{slot}`")]
    MissingSlot { dp_type: String, slot: &'static str },
    #[error("rule {dp_type}: unexpected pattern slot `{slot}`")]
    UnexpectedSlot { dp_type: String, slot: String },
    #[error("pattern `{id}` does not compile: {source}")]
    BadPattern {
        id: String,
        #[source]
        source: regex::Error,
    },
    #[error("rule {0} is defined twice")]
    Duplicate(String),
    #[error("threshold `{name}` out of range: {value}")]
    Threshold { name: &'static str, value: f64 },
}

/// A sidecar or report that failed schema validation.
#[derive(Debug, Error)]
#[error("{file}: {record}: {message}{}", location.map(|(l, c)| format!(" (line {l}, column {c})")).unwrap_or_default())]
pub struct SchemaError {
    pub file: String,
    /// JSON path of the offending record, e.g. `elements[3].bbox`.
    pub record: String,
    pub message: String,
    pub location: Option<(usize, usize)>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

/// Top-level failure of an `analyze` or `evaluate` run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input not found: {}", .0.display())]
    MissingInput(PathBuf),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("image {}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code: 2 missing input, 3 schema violation, 4 internal.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::MissingInput(_) => 2,
            Error::Schema(_) | Error::Rules(_) | Error::Config(_) => 3,
            Error::Extract(ExtractError::MissingSidecar(_)) => 2,
            Error::Extract(ExtractError::MissingAnnotation { .. }) => 3,
            Error::Image { .. } => 3,
            Error::Extract(_) | Error::Io { .. } | Error::Internal(_) => 4,
        }
    }
}
