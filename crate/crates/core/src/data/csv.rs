use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// How to read a delimited data file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvOptions {
    /// First row holds column names.
    pub has_header: bool,
    /// Zero-based label column; the last column when `None`.
    pub label_col: Option<usize>,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

/// Reads a dataset from a CSV file. `?` and empty cells are missing values;
/// class labels are numbered in order of first appearance.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_from(&text, opts, path)
}

/// Like [`load_csv`] but from in-memory text.
pub fn parse_csv(text: &str, opts: &CsvOptions) -> Result<Dataset> {
    parse_csv_from(text, opts, Path::new("<memory>"))
}

fn parse_csv_from(text: &str, opts: &CsvOptions, path: &Path) -> Result<Dataset> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut width: Option<usize> = None;
    let mut label_col = 0;
    let mut header: Option<Vec<String>> = None;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();

    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        match width {
            None => {
                if record.len() < 2 {
                    return Err(err(line, "need at least one attribute and a label column".into()));
                }
                let w = record.len();
                label_col = opts.label_col.unwrap_or(w - 1);
                if label_col >= w {
                    return Err(err(line, format!("label column {label_col} but only {w} columns")));
                }
                width = Some(w);
            }
            Some(w) if record.len() != w => {
                return Err(err(line, format!("expected {w} columns, found {}", record.len())));
            }
            _ => {}
        }
        if opts.has_header && header.is_none() {
            header = Some(record.iter().map(str::to_owned).collect());
            continue;
        }
        let mut row = Vec::with_capacity(record.len() - 1);
        for (col, cell) in record.iter().enumerate() {
            if col == label_col {
                continue;
            }
            if is_missing(cell) {
                row.push(None);
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(Some(v)),
                _ => return Err(err(line, format!("column {col}: cannot parse {cell:?} as a number"))),
            }
        }
        let label = record.get(label_col).unwrap_or_default();
        if is_missing(label) {
            return Err(err(line, "missing class label".into()));
        }
        let class = match class_names.iter().position(|c| c == label) {
            Some(c) => c,
            None => {
                class_names.push(label.to_owned());
                class_names.len() - 1
            }
        };
        features.push(row);
        labels.push(class);
    }

    let Some(width) = width else {
        return Err(err(0, "empty file".into()));
    };
    if labels.is_empty() {
        return Err(err(1, "no data rows".into()));
    }
    let attribute_names = match header {
        Some(h) => h
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != label_col)
            .map(|(_, n)| n)
            .collect(),
        None => (1..width).map(|i| format!("x{i}")).collect(),
    };
    Dataset::new(features, labels, attribute_names, class_names)
}
