use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::Dataset;
use crate::{Error, Result};

/// Optional identifier column; it is never treated as a feature.
pub const ROW_ID_COLUMN: &str = "row_id";

/// Reads a comma-separated file with a mandatory header row.
///
/// Every column other than `target_column` (and an optional `row_id` column)
/// becomes a feature, in header order. Empty cells and `NaN` are rejected as
/// missing values.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, target_column)
}

pub fn read_csv<R: Read>(reader: R, target_column: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingTargetColumn(target_column.to_string()))?;
    let id_idx = header.iter().position(|h| h == ROW_ID_COLUMN);
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != target_idx && Some(c) != id_idx)
        .collect();

    let mut features = Vec::new();
    let mut target = Vec::new();
    let mut row_ids = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() != header.len() {
            return Err(Error::Csv(format!(
                "row {row} has {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        for &c in &feature_cols {
            features.push(parse_cell(&record[c], row, &header[c])?);
        }
        let t = &record[target_idx];
        target.push(match t.parse::<f64>() {
            Ok(v) if v == 0.0 => 0,
            Ok(v) if v == 1.0 => 1,
            _ if t.is_empty() => {
                return Err(Error::MissingValue {
                    row,
                    column: target_column.to_string(),
                })
            }
            _ => {
                return Err(Error::NonBinaryTarget {
                    row,
                    value: t.to_string(),
                })
            }
        });
        row_ids.push(match id_idx {
            Some(c) => record[c].to_string(),
            None => row.to_string(),
        });
    }
    let names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    Dataset::new(features, target, names, row_ids)
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    if cell.is_empty() || cell.eq_ignore_ascii_case("nan") || cell.eq_ignore_ascii_case("na") {
        return Err(Error::MissingValue {
            row,
            column: column.to_string(),
        });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumeric {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

/// Writes `row_id, features…, <target_column>`. Floats use the shortest
/// representation that parses back to the same bits.
pub fn write_csv<W: Write>(data: &Dataset, target_column: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    let mut header = vec![ROW_ID_COLUMN.to_string()];
    header.extend(data.feature_names().iter().cloned());
    header.push(target_column.to_string());
    w.write_record(&header).map_err(csv_err)?;
    let mut record = Vec::with_capacity(header.len());
    for (i, row) in data.rows().enumerate() {
        record.clear();
        record.push(data.row_ids()[i].clone());
        record.extend(row.iter().map(|v| v.to_string()));
        record.push(data.target()[i].to_string());
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}
