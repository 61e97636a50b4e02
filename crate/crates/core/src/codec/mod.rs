//! Text formats for keys, proofs and signatures, and CSV for lab reports.
//!
//! Key-style files are ASCII, LF-terminated, with a fixed header line followed
//! by `key=value` lines in a fixed order:
//!
//! ```text
//! # bezout-owf
//! version=1
//! role=public
//! p=5
//! A=4,3
//! ```
//!
//! Polynomials are comma-separated decimal coefficients, low-to-high, with the
//! zero polynomial written `0`. Root sets are comma-separated increasing
//! integers. Parsing is strict: anything a serializer would not have produced
//! is rejected, so `serialize(parse(f)) == f` byte for byte.

mod csv;
mod text;

use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

pub use csv::{ATTACK_HEADER, SURVEY_HEADER};
pub use text::HEADER;

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: malformed file: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unsupported version {found} (this build reads version {VERSION})")]
    UnsupportedVersion { line: usize, found: String },
    #[error("line {line}: invariant violation: {reason}")]
    InvariantViolation { line: usize, reason: String },
}

impl FormatError {
    pub fn line(&self) -> usize {
        match self {
            FormatError::Malformed { line, .. }
            | FormatError::UnsupportedVersion { line, .. }
            | FormatError::InvariantViolation { line, .. } => *line,
        }
    }

    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        FormatError::Malformed {
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn invariant(line: usize, reason: impl ToString) -> Self {
        FormatError::InvariantViolation {
            line,
            reason: reason.to_string(),
        }
    }
}

/// A value with a canonical, byte-exact text form.
pub trait Artifact: Sized {
    fn to_text(&self) -> String;
    fn from_text(text: &str) -> Result<Self, FormatError>;
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers see either the old file or the complete new one.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
