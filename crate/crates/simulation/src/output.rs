//! CSV and JSON writers for study and example results.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::grid::StudyResult;
use crate::reproduce::ExampleRow;

/// One CSV row per (sample-size pair, threshold) cell.
pub fn write_cells_csv<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for cell in &result.cells {
        w.serialize(cell)?;
    }
    w.flush()?;
    Ok(())
}

/// One CSV row per uniformity check.
pub fn write_uniformity_csv<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n1", "n2", "replications", "ks_statistic", "p_value"])?;
    for u in &result.uniformity {
        w.write_record([
            u.n1.to_string(),
            u.n2.to_string(),
            u.replications.to_string(),
            u.ks_statistic.to_string(),
            u.p_value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One CSV row per comparison of a worked example.
pub fn write_example_csv<W: Write>(rows: &[ExampleRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "label",
        "n1",
        "n2",
        "cv1",
        "cv2",
        "delta_h",
        "mc_se",
        "p_a",
        "p_b",
        "published",
    ])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.n1.to_string(),
            r.n2.to_string(),
            format!("{:.6}", r.cv1),
            format!("{:.6}", r.cv2),
            format!("{:.6}", r.result.delta_h),
            format!("{:.6}", r.result.mc_se),
            format!("{:.6}", r.result.p_a),
            format!("{:.6}", r.result.p_b),
            r.published.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Writes `<stem>.csv` (cells, or uniformity checks) and `<stem>.json` into
/// `dir`.
pub fn write_study_files(result: &StudyResult, dir: &Path, stem: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let csv = std::fs::File::create(dir.join(format!("{stem}.csv")))?;
    if result.cells.is_empty() {
        write_uniformity_csv(result, csv)?;
    } else {
        write_cells_csv(result, csv)?;
    }
    write_json(result, std::fs::File::create(dir.join(format!("{stem}.json")))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellResult, StudyKind};
    use cvbdm::ModelSpec;

    #[test]
    fn cells_csv_has_one_row_per_cell() {
        let cell = CellResult {
            n1: 10,
            n2: 10,
            threshold: 0.95,
            replications: 100,
            exceedances: 5,
            rate: 0.05,
            ci_low: 0.02,
            ci_high: 0.11,
            median: 0.5,
            reference: Some(0.047),
            within_3se: Some(true),
        };
        let result = StudyResult {
            study: StudyKind::Fncr,
            model: ModelSpec::Normal,
            n_replications: 100,
            master_seed: 1,
            cells: vec![cell.clone(), cell],
            series: Vec::new(),
            chains: Vec::new(),
            uniformity: Vec::new(),
        };
        let mut buf = Vec::new();
        write_cells_csv(&result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("n1,n2,threshold"));

        let dir = tempfile::tempdir().unwrap();
        write_study_files(&result, dir.path(), "t").unwrap();
        let back: StudyResult =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
        assert_eq!(back, result);
    }
}
