use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::DatasetManifest;
use super::thread_pool;
use crate::dynamic::{compute_dfm, CohortSpec};
use crate::engine::GrowthRecord;
use crate::error::{Error, Result};
use crate::gbdt::{FeatureRow, FeatureTable};
use crate::static_features::{simplify, static_vector, STATIC_FEATURE_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureFamily {
    Static,
    Dynamic(CohortSpec),
}

impl FeatureFamily {
    /// File stem of the family's table, e.g. `static` or `dynamic_time_10x10`.
    pub fn file_stem(&self) -> String {
        match self {
            FeatureFamily::Static => "static".into(),
            FeatureFamily::Dynamic(c) => format!("dynamic_{}_{}x{}", c.mode.as_str(), c.s, c.r),
        }
    }
}

/// An ordered selection of feature families. Dynamic columns are named
/// `D_i_j` when the set holds a single family and `<mode>_D_i_j` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub families: Vec<FeatureFamily>,
}

impl FeatureSet {
    pub fn new(families: Vec<FeatureFamily>) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::invalid("feature set is empty"));
        }
        for (i, f) in families.iter().enumerate() {
            if families[..i].iter().any(|g| match (f, g) {
                (FeatureFamily::Static, FeatureFamily::Static) => true,
                (FeatureFamily::Dynamic(a), FeatureFamily::Dynamic(b)) => a.mode == b.mode,
                _ => false,
            }) {
                return Err(Error::invalid("feature set repeats a family or cohort mode"));
            }
        }
        Ok(Self { families })
    }

    pub fn single(family: FeatureFamily) -> Self {
        Self { families: vec![family] }
    }

    /// Parses CLI selections such as `static,dynamic` with cohorts
    /// `time:10x10,size:10x10`.
    pub fn from_cli(features: &str, cohorts: &[CohortSpec]) -> Result<Self> {
        let mut families = Vec::new();
        for part in features.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "static" => families.push(FeatureFamily::Static),
                "dynamic" => {
                    if cohorts.is_empty() {
                        return Err(Error::invalid("dynamic features need at least one cohort spec"));
                    }
                    families.extend(cohorts.iter().map(|&c| FeatureFamily::Dynamic(c)));
                }
                other => return Err(Error::invalid(format!("unknown feature family {other:?}"))),
            }
        }
        Self::new(families)
    }

    pub fn columns(&self) -> Vec<String> {
        let prefix = self.families.len() > 1;
        let mut out = Vec::new();
        for f in &self.families {
            match f {
                FeatureFamily::Static => out.extend(STATIC_FEATURE_NAMES.iter().map(|s| s.to_string())),
                FeatureFamily::Dynamic(c) => {
                    let names = c.column_names();
                    if prefix {
                        out.extend(names.into_iter().map(|n| format!("{}_{n}", c.mode.as_str())));
                    } else {
                        out.extend(names);
                    }
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        self.families
            .iter()
            .map(|f| match f {
                FeatureFamily::Static => "static".to_string(),
                FeatureFamily::Dynamic(c) => c.label(),
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Feature values of one record, in [`FeatureSet::columns`] order.
    pub fn compute(&self, record: &GrowthRecord) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for f in &self.families {
            match f {
                FeatureFamily::Static => out.extend_from_slice(&static_vector(&simplify(record)).values),
                FeatureFamily::Dynamic(c) => out.extend(compute_dfm(record, c)?.values),
            }
        }
        Ok(out)
    }
}

/// Per-family feature tables of a dataset, rows ordered by network id.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedFeatures {
    pub tables: Vec<(FeatureFamily, FeatureTable)>,
    /// Every family side by side, see [`FeatureSet`] for column naming.
    pub joined: FeatureTable,
    /// Networks that could not be read, with the reason.
    pub skipped: Vec<(String, String)>,
}

impl ExtractedFeatures {
    pub fn table(&self, family: FeatureFamily) -> Option<&FeatureTable> {
        self.tables.iter().find(|(f, _)| *f == family).map(|(_, t)| t)
    }

    /// Writes `<family>.csv` per family plus `joined.csv`; dynamic tables
    /// carry `mode,s,r` columns after the class code. Returns the paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for (family, table) in &self.tables {
            let path = dir.join(format!("{}.csv", family.file_stem()));
            let text = match family {
                FeatureFamily::Static => table.to_csv_string(),
                FeatureFamily::Dynamic(c) => dynamic_csv(table, c),
            };
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            paths.push(path);
        }
        let path = dir.join("joined.csv");
        self.joined.write_csv(&path)?;
        paths.push(path);
        Ok(paths)
    }
}

fn dynamic_csv(table: &FeatureTable, spec: &CohortSpec) -> String {
    let meta = format!("{},{},{}", spec.mode.as_str(), spec.s, spec.r);
    let mut lines = table.to_csv_string().lines().map(str::to_string).collect::<Vec<_>>();
    for (i, line) in lines.iter_mut().enumerate() {
        let (id, rest) = line.split_once(',').expect("network_id column");
        let (code, values) = rest.split_once(',').unwrap_or((rest, ""));
        let middle = if i == 0 { "mode,s,r".to_string() } else { meta.clone() };
        *line = format!("{id},{code},{middle},{values}");
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// Computes every family for every network in the manifest, in parallel.
/// Networks whose files cannot be read are skipped and logged.
pub fn extract_features(
    manifest: &DatasetManifest,
    dataset_dir: &Path,
    families: &[FeatureFamily],
    workers: usize,
) -> Result<ExtractedFeatures> {
    let sets: Vec<FeatureSet> = families.iter().map(|&f| FeatureSet::single(f)).collect();
    let joined_set = FeatureSet::new(families.to_vec())?;
    let mut entries: Vec<_> = manifest.entries.iter().collect();
    entries.sort_by(|a, b| a.network_id.cmp(&b.network_id));

    let results: Vec<Result<Vec<Vec<f64>>>> = thread_pool(workers)?.install(|| {
        entries
            .par_iter()
            .map(|entry| {
                let record = GrowthRecord::read_dir(&dataset_dir.join(&entry.path))?;
                sets.iter().map(|s| s.compute(&record)).collect()
            })
            .collect()
    });

    let mut tables: Vec<(FeatureFamily, FeatureTable)> = families
        .iter()
        .zip(&sets)
        .map(|(&f, s)| (f, FeatureTable::new(s.columns())))
        .collect();
    let mut joined = FeatureTable::new(joined_set.columns());
    let mut skipped = Vec::new();
    for (entry, result) in entries.iter().zip(results) {
        match result {
            Ok(per_family) => {
                let mut all = Vec::new();
                for ((_, table), values) in tables.iter_mut().zip(per_family) {
                    all.extend_from_slice(&values);
                    table.push(FeatureRow {
                        network_id: entry.network_id.clone(),
                        label: Some(entry.class_code),
                        features: values,
                    })?;
                }
                joined.push(FeatureRow {
                    network_id: entry.network_id.clone(),
                    label: Some(entry.class_code),
                    features: all,
                })?;
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", entry.network_id);
                skipped.push((entry.network_id.clone(), e.to_string()));
            }
        }
    }
    Ok(ExtractedFeatures { tables, joined, skipped })
}
