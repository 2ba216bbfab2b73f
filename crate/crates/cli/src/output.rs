//! Deterministic file output: CSV tables and JSON records.
//!
//! Every writer here is plain and synchronous — repetitions and sweep points
//! are computed in parallel, collected in order, and written by the single
//! caller thread, so a fixed master seed yields byte-identical files.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// Create the output directory if needed.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Write a pretty-printed JSON document with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serialise record")?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Write a CSV table with an explicit header row.
///
/// The header is written even when `rows` is empty, so downstream tooling
/// can always read the column contract off the file.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    wtr.write_record(header)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}
