use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::features::FeatureSet;
use crate::dynamic::{CohortSpec, CornerCorrelation, DeltaMatrix};
use crate::engine::GrowthRecord;
use crate::error::{Error, Result};
use crate::gbdt::{EvalReport, FeatureTable, GbdtModel};
use crate::model::ModelClass;

/// Class distribution for one network under one feature family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub network: String,
    pub features: String,
    /// Probability per class name, in class-code order.
    pub probabilities: Vec<(String, f64)>,
    pub predicted: String,
    pub predicted_code: u8,
}

/// Computes `features` on `record` and classifies it. The model must have
/// been trained on exactly the same columns.
pub fn classify_network(model: &GbdtModel, record: &GrowthRecord, features: &FeatureSet, network: &str) -> Result<ClassificationReport> {
    model.check_columns(&features.columns())?;
    let x = features.compute(record)?;
    let p = model.predict_proba(&x);
    let code = model.predict(&x);
    Ok(ClassificationReport {
        network: network.to_string(),
        features: features.label(),
        probabilities: ModelClass::ALL.iter().map(|c| (c.name().to_string(), p[c.code() as usize])).collect(),
        predicted: ModelClass::from_code(code).expect("class code").name().to_string(),
        predicted_code: code,
    })
}

fn write(path: &Path, text: String) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Writes `eval.json`, `confusion.csv` and, when given, `importance.csv`
/// (`feature,importance` in column order).
pub fn write_eval_report(
    report: &EvalReport,
    importance: Option<(&[String], &[f64])>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = vec![
        write(&dir.join("eval.json"), serde_json::to_string_pretty(report)?)?,
        write(&dir.join("confusion.csv"), report.confusion_csv())?,
    ];
    if let Some((names, values)) = importance {
        let mut text = String::from("feature,importance\n");
        for (n, v) in names.iter().zip(values) {
            text.push_str(&format!("{n},{v}\n"));
        }
        out.push(write(&dir.join("importance.csv"), text)?);
    }
    Ok(out)
}

/// An `s x r` grid with header `cohort,G1..Gr` and one row per cohort.
pub fn write_matrix_csv(path: &Path, values: &[f64], s: usize, r: usize) -> Result<PathBuf> {
    let mut text = String::from("cohort");
    for j in 1..=r {
        text.push_str(&format!(",G{j}"));
    }
    text.push('\n');
    for i in 0..s {
        text.push_str(&(i + 1).to_string());
        for v in &values[i * r..(i + 1) * r] {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    write(path, text)
}

/// Reads a grid written by [`write_matrix_csv`]; returns `(values, s, r)`.
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<f64>, usize, usize)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let r = rdr.headers()?.len().saturating_sub(1);
    let mut values = Vec::new();
    let mut s = 0;
    for rec in rdr.records() {
        let rec = rec?;
        for v in rec.iter().skip(1) {
            values.push(v.parse::<f64>().map_err(|_| Error::data(format!("bad value {v:?} in {}", path.display())))?);
        }
        s += 1;
    }
    if values.len() != s * r {
        return Err(Error::data(format!("{} is not rectangular", path.display())));
    }
    Ok((values, s, r))
}

/// One `delta_<class>.csv` per class.
pub fn write_delta_matrices(deltas: &[DeltaMatrix], spec: &CohortSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    deltas
        .iter()
        .map(|d| write_matrix_csv(&dir.join(format!("delta_{}.csv", d.class.name())), &d.values, spec.s, spec.r))
        .collect()
}

/// One `corner_<i>_<j>.csv` per corner.
pub fn write_corner_correlations(corners: &[CornerCorrelation], spec: &CohortSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    corners
        .iter()
        .map(|c| {
            let (i, j) = c.corner;
            write_matrix_csv(&dir.join(format!("corner_{i}_{j}.csv")), &c.values, spec.s, spec.r)
        })
        .collect()
}

/// Mean dynamic feature matrix of every class present in a labeled table
/// of `D_i_j` columns, in class-code order.
pub fn class_mean_matrices(table: &FeatureTable) -> Result<Vec<(ModelClass, Vec<f64>)>> {
    let labels = table.labels()?;
    let mut by: BTreeMap<u8, Vec<&[f64]>> = BTreeMap::new();
    for (row, &l) in table.rows().iter().zip(&labels) {
        by.entry(l).or_default().push(&row.features);
    }
    by.into_iter()
        .map(|(code, rows)| {
            let class = ModelClass::from_code(code).ok_or_else(|| Error::data(format!("class code {code} out of range")))?;
            Ok((class, crate::dynamic::mean_matrix(rows).expect("nonempty class")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let values = vec![0.1, -1.0, 1.0 / 3.0, 0.0, 2.5e-17, 7.0];
        let p = write_matrix_csv(&dir.path().join("m.csv"), &values, 2, 3).unwrap();
        assert_eq!(read_matrix_csv(&p).unwrap(), (values, 2, 3));
    }

    #[test]
    fn confusion_csv_is_labeled() {
        let r = EvalReport::from_predictions(&[0, 1, 8], &[0, 1, 0]);
        let dir = tempfile::tempdir().unwrap();
        write_eval_report(&r, None, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("confusion.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[0].ends_with("AP,F_expAP"));
        assert!(lines[9].starts_with("F_expAP,1,"));
        let back: EvalReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval.json")).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
