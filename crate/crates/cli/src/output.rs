use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// File-name tag of a speed, e.g. `c-3.000000`.
pub fn speed_tag(c: f64) -> String {
    format!("c{c:+.6}")
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `rows` as `<stem>.csv`, or as a JSON array in `<stem>.json`.
pub fn write_table<T: Serialize>(dir: &Path, stem: &str, rows: &[T], format: Format) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    match format {
        Format::Json => write_json(&path, rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(path)
}
