//! Sample files.
//!
//! * value CSV: a header with a `value` column and, optionally, a `count`
//!   column giving how many times each value occurs;
//! * summary TOML: keys `n`, `mean` and `sd` (divide-by-`n` convention),
//!   usable with the Normal model only;
//! * grouped CSV: a `value` column plus key columns that split the rows into
//!   samples.

use std::path::Path;

use cvbdm::Sample;
use serde::Deserialize;

use crate::error::{Result, SimError};

fn malformed(path: &Path, message: impl Into<String>) -> SimError {
    SimError::Malformed {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummaryFile {
    n: usize,
    mean: f64,
    sd: f64,
}

/// Reads a summary TOML file.
pub fn read_summary_toml(path: &Path) -> Result<Sample> {
    let text = std::fs::read_to_string(path)?;
    let s: SummaryFile = toml::from_str(&text).map_err(|e| malformed(path, e.to_string()))?;
    Ok(Sample::from_summary(s.n, s.mean, s.sd)?)
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn parse_value(path: &Path, record: &csv::StringRecord, index: usize) -> Result<f64> {
    let field = record.get(index).unwrap_or("");
    let line = record.position().map_or(0, |p| p.line());
    field
        .parse()
        .map_err(|_| malformed(path, format!("line {line}: `{field}` is not a number")))
}

/// Reads a value CSV, expanding the optional `count` column.
pub fn read_values_csv(path: &Path) -> Result<Sample> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let vi = column(&headers, "value").ok_or_else(|| malformed(path, "missing `value` column"))?;
    let ci = column(&headers, "count");
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let v = parse_value(path, &record, vi)?;
        let times = match ci {
            Some(ci) => {
                let c = parse_value(path, &record, ci)?;
                if c < 0.0 || c.fract() != 0.0 {
                    let line = record.position().map_or(0, |p| p.line());
                    return Err(malformed(
                        path,
                        format!("line {line}: count {c} is not a nonnegative integer"),
                    ));
                }
                c as usize
            }
            None => 1,
        };
        values.extend(std::iter::repeat_n(v, times));
    }
    Ok(Sample::from_values(values)?)
}

/// Reads a summary TOML (`.toml` extension) or a value CSV.
pub fn read_sample(path: &Path) -> Result<Sample> {
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        read_summary_toml(path)
    } else {
        read_values_csv(path)
    }
}

/// Values of a CSV grouped by the `keys` columns, in order of first
/// appearance.
pub fn read_grouped_csv(path: &Path, keys: &[&str]) -> Result<Vec<(Vec<String>, Vec<f64>)>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let vi = column(&headers, "value").ok_or_else(|| malformed(path, "missing `value` column"))?;
    let ki = keys
        .iter()
        .map(|k| column(&headers, k).ok_or_else(|| malformed(path, format!("missing `{k}` column"))))
        .collect::<Result<Vec<_>>>()?;
    let mut groups: Vec<(Vec<String>, Vec<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let key: Vec<String> = ki.iter().map(|&i| record.get(i).unwrap_or("").to_string()).collect();
        let v = parse_value(path, &record, vi)?;
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, vals)) => vals.push(v),
            None => groups.push((key, vec![v])),
        }
    }
    Ok(groups)
}
