//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while parsing JSONL input or query text.
#[derive(Debug, Error)]
pub enum ParseError {
    /// The text is not a complete JSON value. `line` is the physical
    /// 1-based line number within the input (0 for standalone queries).
    #[error("line {line}: malformed JSON: {message}")]
    MalformedJson { line: usize, message: String },

    /// A dataset line whose top-level value is not a JSON object.
    #[error("line {line}: top-level value must be a JSON object")]
    NotAnObject { line: usize },
}

/// Errors raised while merging trees.
#[derive(Debug, Error)]
pub enum MergeError {
    #[error("cannot merge an empty corpus")]
    EmptyCorpus,
}

/// Errors raised while normalizing a merged tree against a symbol table.
#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("label not present in symbol table: {0}")]
    UnknownLabel(String),
}

/// Errors raised while building the index.
#[derive(Debug, Error)]
pub enum BuildError {
    #[error("cannot build an index from an empty tree")]
    EmptyTree,
}

/// Errors raised while loading a serialized index.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("bad magic bytes: not an index file")]
    BadMagic,

    #[error("unsupported index format version {0}")]
    VersionMismatch(u32),

    #[error("index file is truncated or structurally invalid")]
    Truncated,

    #[error("index file checksum mismatch")]
    ChecksumFail,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
