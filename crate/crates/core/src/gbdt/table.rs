use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub network_id: String,
    /// Class code, `None` for unlabeled rows.
    pub label: Option<u8>,
    pub features: Vec<f64>,
}

/// Rows of equal width with named columns; all values finite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    columns: Vec<String>,
    rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: FeatureRow) -> Result<()> {
        if row.features.len() != self.columns.len() {
            return Err(Error::data(format!(
                "row {} has {} features, table has {} columns",
                row.network_id,
                row.features.len(),
                self.columns.len()
            )));
        }
        if let Some(i) = row.features.iter().position(|x| !x.is_finite()) {
            return Err(Error::data(format!(
                "row {} has a non-finite value in column {}",
                row.network_id, self.columns[i]
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Labels of every row; errors on unlabeled rows.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                r.label
                    .ok_or_else(|| Error::data(format!("row {} is unlabeled", r.network_id)))
            })
            .collect()
    }

    pub fn subset(&self, indices: &[usize]) -> FeatureTable {
        FeatureTable {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<FeatureTable> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.columns
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::data(format!("column {n} not in table")))
            })
            .collect::<Result<_>>()?;
        Ok(FeatureTable {
            columns: names.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| FeatureRow {
                    network_id: r.network_id.clone(),
                    label: r.label,
                    features: idx.iter().map(|&i| r.features[i]).collect(),
                })
                .collect(),
        })
    }

    /// Concatenates columns of two tables with the same network ids in the
    /// same order.
    pub fn join(&self, other: &FeatureTable) -> Result<FeatureTable> {
        if self.rows.len() != other.rows.len() {
            return Err(Error::data("joined tables have different row counts"));
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        let mut out = FeatureTable::new(columns);
        for (a, b) in self.rows.iter().zip(&other.rows) {
            if a.network_id != b.network_id || a.label != b.label {
                return Err(Error::data(format!(
                    "joined tables disagree on row {} / {}",
                    a.network_id, b.network_id
                )));
            }
            let mut features = a.features.clone();
            features.extend_from_slice(&b.features);
            out.push(FeatureRow {
                network_id: a.network_id.clone(),
                label: a.label,
                features,
            })?;
        }
        Ok(out)
    }

    /// `network_id,class_code,<columns...>`; an empty class code marks an
    /// unlabeled row.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("network_id,class_code");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.network_id);
            out.push(',');
            if let Some(l) = r.label {
                out.push_str(&l.to_string());
            }
            for x in &r.features {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    /// Reads a table; the columns `mode`, `s`, `r` of dynamic-feature files
    /// are metadata and skipped.
    pub fn read_csv(path: &Path) -> Result<FeatureTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<FeatureTable> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "network_id" || &headers[1] != "class_code" {
            return Err(Error::data("feature table must start with network_id,class_code"));
        }
        let meta = ["mode", "s", "r"];
        let keep: Vec<usize> = (2..headers.len()).filter(|&i| !meta.contains(&&headers[i])).collect();
        let mut table = FeatureTable::new(keep.iter().map(|&i| headers[i].to_string()).collect());
        for rec in rdr.records() {
            let rec = rec?;
            let label = match rec[1].trim() {
                "" => None,
                s => Some(s.parse::<u8>().map_err(|_| Error::data(format!("bad class code {s:?}")))?),
            };
            let features = keep
                .iter()
                .map(|&i| {
                    rec[i]
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| Error::data(format!("bad value {:?} in column {}", &rec[i], &headers[i])))
                })
                .collect::<Result<Vec<f64>>>()?;
            table.push(FeatureRow {
                network_id: rec[0].to_string(),
                label,
                features,
            })?;
        }
        Ok(table)
    }

    /// Row index by network id.
    pub fn index_by_id(&self) -> HashMap<&str, usize> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.network_id.as_str(), i))
            .collect()
    }
}
