//! CSV export of chains and their autocorrelations for external plotting.
//!
//! Trace files have a header `iteration,<coordinate>,...` and one row per
//! retained draw; ACF files have a header `lag,<coordinate>,...`.

use std::io::{Read, Write};

use super::{autocorrelation, DrawMatrix};
use crate::error::{Error, Result};

pub fn write_trace_csv<W: Write>(draws: &DrawMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["iteration".to_string()];
    header.extend(draws.names().iter().cloned());
    w.write_record(&header)?;
    for (i, row) in draws.rows().enumerate() {
        let mut record = vec![i.to_string()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace_csv`]. A leading `iteration`
/// column is optional and ignored.
pub fn read_trace_csv<R: Read>(reader: R) -> Result<DrawMatrix> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = r.headers()?.clone();
    let skip = usize::from(header.get(0) == Some("iteration"));
    let names: Vec<String> = header.iter().skip(skip).map(str::to_string).collect();
    if names.is_empty() {
        return Err(Error::InvalidSample("trace has no coordinate columns".into()));
    }
    let mut m = DrawMatrix::new(names);
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .skip(skip)
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::InvalidSample(format!("row {}: '{f}' is not a finite number", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        m.push_row(&row)?;
    }
    if m.n_rows() == 0 {
        return Err(Error::EmptyDraws);
    }
    Ok(m)
}

pub fn write_acf_csv<W: Write>(draws: &DrawMatrix, max_lag: usize, writer: W) -> Result<()> {
    let acfs: Vec<Vec<f64>> = (0..draws.n_cols())
        .map(|j| autocorrelation(&draws.column(j), max_lag))
        .collect();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["lag".to_string()];
    header.extend(draws.names().iter().cloned());
    w.write_record(&header)?;
    let lags = acfs.first().map_or(0, Vec::len);
    for k in 0..lags {
        let mut record = vec![k.to_string()];
        record.extend(acfs.iter().map(|a| a[k].to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
