//! Labeled count tables as comma-separated text.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::datasets::Dataset;
use crate::matrix::Matrix;

/// Reads a table whose first row holds column labels and whose first column
/// holds row labels. The corner cell is ignored.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(&text, &name, &format!("file {}", path.display()))
}

pub fn parse_csv(text: &str, name: &str, provenance: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(&e))?,
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "empty input".into(),
            })
        }
    };
    let width = header.len();
    if width < 2 {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "need a label column and at least one data column (is the delimiter a comma?)".into(),
        });
    }
    let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut row_labels = Vec::new();
    let mut values = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(&e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() == 1 && rec.get(0).is_some_and(str::is_empty) {
            continue;
        }
        if rec.len() != width {
            return Err(Error::RaggedRow {
                line,
                found: rec.len(),
                expected: width,
            });
        }
        row_labels.push(rec[0].to_string());
        for (c, field) in rec.iter().enumerate().skip(1) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: c + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: c + 1,
                    message: format!("`{field}` is not finite"),
                });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry {
                    row: row_labels.len() - 1,
                    col: c - 1,
                    value: v,
                });
            }
            values.push(v);
        }
    }
    if row_labels.is_empty() {
        return Err(Error::Parse {
            line: 2,
            column: 1,
            message: "no data rows".into(),
        });
    }
    let counts = Matrix::new(row_labels.len(), width - 1, values)?;
    Dataset::new(name, row_labels, col_labels, counts, provenance)
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        column: 1,
        message: e.to_string(),
    }
}

/// Writes a labeled matrix; values use the shortest round-trip form.
pub fn write_csv(
    path: impl AsRef<Path>,
    corner: &str,
    row_labels: &[String],
    col_labels: &[String],
    m: &Matrix,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let mut head = vec![corner.to_string()];
    head.extend(col_labels.iter().cloned());
    w.write_record(&head).map_err(|e| Error::Io(e.to_string()))?;
    for (i, label) in row_labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(m.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
