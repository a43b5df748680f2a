//! CSV and line-oriented text input.

use std::fs;
use std::path::Path;

use varskip_core::data::{Table, TextTable};

use crate::{AppError, AppResult};

/// Reads a headed CSV into a dictionary-encoded table, keeping `columns`
/// (all when `None`) in the given order.
pub fn read_csv(path: &Path, name: &str, columns: Option<&[String]>) -> AppResult<Table> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => AppError::format(path, e.to_string()),
        _ => AppError::Csv(e),
    })?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let keep: Vec<usize> = match columns {
        None => (0..headers.len()).collect(),
        Some(wanted) => wanted
            .iter()
            .map(|w| headers.iter().position(|h| h == w).ok_or_else(|| varskip_core::Error::MissingColumn(w.clone())))
            .collect::<Result<_, _>>()?,
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(keep.iter().map(|&i| record.get(i).unwrap_or("").to_string()).collect::<Vec<_>>());
    }
    let names: Vec<&str> = keep.iter().map(|&i| headers[i].as_str()).collect();
    Ok(Table::from_raw_rows(name, &names, &rows)?)
}

/// Reads one string per line (trailing newline characters stripped).
pub fn read_lines(path: &Path) -> AppResult<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

pub fn read_corpus(path: &Path, width: usize) -> AppResult<TextTable> {
    let lines = read_lines(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("corpus");
    Ok(TextTable::from_strings(name, &lines, width)?)
}
