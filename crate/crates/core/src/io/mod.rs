//! Persistence and rendering: the `.gprd` binary radargram format, CSV
//! import/export, comparison tables and grayscale B-scan images.
//!
//! All writers go through a write-then-rename so a failed command never
//! leaves a partial file behind.

mod csv_io;
mod gprd;
mod render;

pub use csv_io::{export_csv, import_csv, write_compare_table};
pub use gprd::{read_radargram, write_radargram, FORMAT_VERSION, MAGIC};
pub use render::render_bscan;

use std::io::Write;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        /// 1-based row.
        row: usize,
        /// 1-based column; 0 when the whole row is at fault.
        col: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Write atomically: the bytes land in a temporary file next to the target
/// and are renamed over it only once complete.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| IoError::Io(e.error))?;
    Ok(())
}
