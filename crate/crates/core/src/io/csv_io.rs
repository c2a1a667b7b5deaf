//! CSV import/export. Radargrams are stored rows-as-samples,
//! columns-as-traces; floats are printed in shortest round-trip form, so a
//! write/read cycle is value-exact.

use std::path::Path;

use super::{atomic_write, IoError};
use crate::eval::CompareRow;
use crate::signal::{Radargram, Trace};

/// Read a rectangular numeric CSV into a radargram. Rows are samples,
/// columns are traces; `dt`/`dx` supply the axes the format does not carry.
pub fn import_csv(path: &Path, dt: f64, dx: f64) -> Result<Radargram, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_path(path)
        .map_err(|e| IoError::InvalidInput(e.to_string()))?;

    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { pos, .. } => IoError::Parse {
                row: pos.as_ref().map_or(row_idx + 1, |p| p.line() as usize),
                col: 0,
                message: "ragged row".into(),
            },
            _ => IoError::Parse {
                row: row_idx + 1,
                col: 0,
                message: e.to_string(),
            },
        })?;
        if columns.is_empty() {
            columns = vec![Vec::new(); record.len()];
        }
        for (col_idx, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| IoError::Parse {
                row: row_idx + 1,
                col: col_idx + 1,
                message: format!("`{field}` is not a number"),
            })?;
            columns[col_idx].push(value);
        }
    }
    if columns.is_empty() {
        return Err(IoError::Parse {
            row: 0,
            col: 0,
            message: "empty csv".into(),
        });
    }
    let traces: Result<Vec<Trace>, _> = columns
        .into_iter()
        .map(|samples| Trace::new(samples, dt, 0.0))
        .collect();
    let traces = traces.map_err(|e| IoError::InvalidInput(e.to_string()))?;
    Radargram::new(traces, dx).map_err(|e| IoError::InvalidInput(e.to_string()))
}

pub fn export_csv(r: &Radargram, path: &Path) -> Result<(), IoError> {
    let mut buf = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buf);
        for s in 0..r.samples_per_trace() {
            let row: Vec<String> = r.traces.iter().map(|t| t.samples[s].to_string()).collect();
            writer
                .write_record(&row)
                .map_err(|e| IoError::InvalidInput(e.to_string()))?;
        }
        writer.flush()?;
    }
    atomic_write(path, &buf)
}

/// Write a method-comparison table:
/// `method,seed,input_snr_db,output_snr_db,runtime_ms`, one row per
/// method run. A failed method leaves `nan` in its output column.
pub fn write_compare_table(rows: &[CompareRow], path: &Path) -> Result<(), IoError> {
    let mut buf = String::from("method,seed,input_snr_db,output_snr_db,runtime_ms\n");
    for row in rows {
        let output = row.output_snr_db.unwrap_or(f64::NAN);
        buf.push_str(&format!(
            "{},{},{},{},{}\n",
            row.method.name(),
            row.seed,
            row.input_snr_db,
            output,
            row.runtime_ms
        ));
    }
    atomic_write(path, buf.as_bytes())
}
