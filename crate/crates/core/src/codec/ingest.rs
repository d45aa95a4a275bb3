//! Dataset ingestion from CSV and JSON array-of-arrays files.

use std::path::Path;

use super::{CodecError, QuantizedScalar, TupleDataset};

/// Parses comma-separated fixed-point decimals, one row per line.
///
/// The column count is taken from the first data row. Blank lines are skipped.
pub fn parse_csv(text: &str, has_header: bool) -> Result<TupleDataset, CodecError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut dataset: Option<TupleDataset> = None;
    let mut row = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CodecError::Input {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        row.clear();
        for field in record.iter() {
            let v = field.parse::<QuantizedScalar>().map_err(|e| CodecError::Input {
                line,
                message: e.to_string(),
            })?;
            row.push(v);
        }
        let d = match &mut dataset {
            Some(d) => d,
            None => dataset.insert(TupleDataset::empty(row.len()).map_err(|e| CodecError::Input {
                line,
                message: e.to_string(),
            })?),
        };
        d.push_row(&row).map_err(|e| CodecError::Input {
            line,
            message: e.to_string(),
        })?;
    }
    dataset.ok_or(CodecError::Input {
        line: 0,
        message: "no data rows".into(),
    })
}

/// Parses a JSON array of equal-length numeric arrays.
pub fn parse_json(text: &str) -> Result<TupleDataset, CodecError> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| CodecError::Input {
        line: e.line(),
        message: e.to_string(),
    })?;
    let n_cols = rows.first().map(Vec::len).ok_or(CodecError::Input {
        line: 1,
        message: "no data rows".into(),
    })?;
    TupleDataset::from_f64_rows(n_cols, rows)
}

/// Reads a dataset file; `.json` files are parsed as JSON, everything else as CSV.
pub fn read_dataset(path: &Path, has_header: bool) -> Result<TupleDataset, CodecError> {
    let text = std::fs::read_to_string(path).map_err(|e| CodecError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => parse_json(&text),
        _ => parse_csv(&text, has_header),
    }
}
